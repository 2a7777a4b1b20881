use std::time::Instant;

use diracbi::check::all_pass;
use diracbi::sampling::CheckConfig;
use diracbi::zoo::{check_instance, PRESETS};

#[test]
fn presets_report() {
    let cfg = CheckConfig::default();
    for p in PRESETS {
        let t = Instant::now();
        let inst = p.build().unwrap();
        let outs = check_instance(&inst, &cfg);
        eprintln!("{}: {} outcomes in {:?}", p.name, outs.len(), t.elapsed());
        for o in outs.iter().filter(|o| !o.passed()) {
            eprintln!(
                "  fail {} {:?} {:?}",
                o.name,
                o.witnesses.first().map(|w| &w.label),
                o.note
            );
        }
        assert_eq!(all_pass(&outs), p.positive, "{}", p.name);
    }
}
