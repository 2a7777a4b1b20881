//! Instance files: sectioned `key = value` text with typed blocks.
//!
//! ```text
//! [patch]
//! coords = x, y
//!
//! [bundle.A]
//! rank = 2
//! tangent = true
//!
//! [anchor.A]
//! row1 = 1, 0
//! row2 = 0, x
//!
//! [bracket.A]
//! skew = true
//! 1,2 = 0, y
//! ```
//!
//! Names must be declared before they are referenced. Every diagnostic
//! carries `file:line:col`.

use std::collections::HashMap;

use crate::algebroid::{DullAlgebroid, DullBracket, LinearConnection};
use crate::bialgebroid::{DiracBialgebroid, LADiracTriple};
use crate::bundle::matrix::Mat;
use crate::bundle::section::{self, Sec};
use crate::bundle::{Frame, Patch};
use crate::cartan::TwoForm;
use crate::courant::{
    degenerate_courant, dirac_from_2form, dirac_from_foliation, dirac_from_poisson, standard_courant,
    CourantPresentation,
};
use crate::dorfman::DorfmanConnection;
use crate::error::{Error, Result};
use crate::sampling::CheckConfig;
use crate::scalar::Scalar;
use crate::zoo::{
    adapted_dorfman_poisson, adapted_dorfman_presymplectic, courant_double, poisson_triple, presymplectic_triple,
    DiracBialgebraData, IISData, IMTwoForm, LieBialgebroidData, ZooInstance,
};

/// A Dirac structure request: the Courant algebroid it lives in and a frame.
#[derive(Clone, Debug)]
pub struct DiracRequest {
    pub name: String,
    pub courant: String,
    pub vectors: Vec<Sec>,
}

/// A validated instance file.
#[derive(Clone, Debug, Default)]
pub struct Instance {
    pub path: String,
    pub patch: Option<Patch>,
    pub algebroids: Vec<(String, DullAlgebroid)>,
    pub dorfman: Vec<(String, DorfmanConnection)>,
    pub subbundles: Vec<(String, Frame)>,
    pub connections: Vec<(String, LinearConnection)>,
    pub pi: Option<TwoForm>,
    pub omega: Option<TwoForm>,
    pub lie_bialgebroid: Option<LieBialgebroidData>,
    pub sigma: Option<IMTwoForm>,
    pub iis: Option<IISData>,
    pub bialgebra: Option<DiracBialgebraData>,
    pub courants: Vec<(String, CourantPresentation)>,
    pub diracs: Vec<DiracRequest>,
    pub triples: Vec<(String, LADiracTriple)>,
    pub bialgebroids: Vec<(String, DiracBialgebroid)>,
    /// Suites run by `all`, when given.
    pub suites: Option<Vec<String>>,
}

impl Instance {
    /// The example families declared in the file.
    pub fn families(&self) -> Vec<ZooInstance> {
        let mut out = Vec::new();
        if let Some(lb) = &self.lie_bialgebroid {
            out.push(ZooInstance::LieBialgebroid(lb.clone()));
        }
        if let Some(im) = &self.sigma {
            out.push(ZooInstance::Im2Form(im.clone()));
        }
        if let Some(iis) = &self.iis {
            out.push(ZooInstance::Iis(iis.clone()));
        }
        if let Some(db) = &self.bialgebra {
            out.push(ZooInstance::Bialgebra(db.clone()));
        }
        out
    }

    pub fn algebroid(&self, name: &str) -> Option<&DullAlgebroid> {
        self.algebroids.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }
}

struct Entry {
    key: String,
    key_col: usize,
    value: String,
    value_col: usize,
    line: usize,
}

struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: Vec<Entry>,
}

struct BundleState {
    rank: usize,
    label: String,
    anchor: Mat,
    structure: Vec<Vec<Sec>>,
    used: bool,
}

struct Ctx<'a> {
    file: &'a str,
    patch: Option<Patch>,
    bundles: HashMap<String, BundleState>,
    subbundles: HashMap<String, Frame>,
    dorfman: HashMap<String, (String, DorfmanConnection)>,
    connections: HashMap<String, (String, LinearConnection)>,
    courants: HashMap<String, usize>,
    inst: Instance,
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

fn char_col(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

fn lex(file: &str, text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let code = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = code.len() - code.trim_start().len();
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(err(file, no, char_col(raw, lead), "unterminated section header"));
            }
            let head = trimmed[1..trimmed.len() - 1].trim();
            let (kind, name) = match head.split_once('.') {
                Some((k, n)) => (k.trim().to_string(), Some(n.trim().to_string())),
                None => (head.to_string(), None),
            };
            if !is_ident(&kind) || name.as_deref().is_some_and(|n| !is_ident(n)) {
                return Err(err(
                    file,
                    no,
                    char_col(raw, lead + 1),
                    format!("malformed section header `[{head}]`"),
                ));
            }
            sections.push(Section {
                kind,
                name,
                line: no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = code.find('=') else {
            return Err(err(
                file,
                no,
                char_col(raw, lead),
                "expected `key = value` or a `[section]` header",
            ));
        };
        let Some(sec) = sections.last_mut() else {
            return Err(err(file, no, char_col(raw, lead), "entry outside of any section"));
        };
        let key = code[..eq].trim().to_string();
        let vraw = &code[eq + 1..];
        let vlead = vraw.len() - vraw.trim_start().len();
        let value = vraw.trim().to_string();
        if key.is_empty() {
            return Err(err(file, no, char_col(raw, lead), "missing key"));
        }
        sec.entries.push(Entry {
            key,
            key_col: char_col(raw, lead),
            value,
            value_col: char_col(raw, eq + 1 + vlead),
            line: no,
        });
    }
    Ok(sections)
}

fn err(file: &str, line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Instance {
        file: file.to_string(),
        line,
        col,
        msg: msg.into(),
    }
}

/// Splits at top-level commas, returning items with their starting columns.
fn split_list(value: &str, col: usize) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let chars: Vec<char> = value.chars().collect();
    for (i, ch) in chars.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, i));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, chars.len()));
    out.into_iter()
        .map(|(a, b)| {
            let item: String = chars[a..b].iter().collect();
            let lead = item.chars().count() - item.trim_start().chars().count();
            (item.trim().to_string(), col + a + lead)
        })
        .collect()
}

impl<'a> Ctx<'a> {
    fn at(&self, e: &Entry, msg: impl Into<String>) -> Error {
        err(self.file, e.line, e.value_col, msg)
    }

    fn at_key(&self, e: &Entry, msg: impl Into<String>) -> Error {
        err(self.file, e.line, e.key_col, msg)
    }

    fn at_section(&self, s: &Section, msg: impl Into<String>) -> Error {
        err(self.file, s.line, 1, msg)
    }

    fn patch(&self, s: &Section) -> Result<&Patch> {
        self.patch
            .as_ref()
            .ok_or_else(|| self.at_section(s, format!("[{}] needs a preceding [patch]", header(s))))
    }

    fn expr(&self, patch: &Patch, text: &str, line: usize, col: usize) -> Result<Scalar> {
        patch.parse(text).map_err(|e| {
            let (pos, msg) = match &e {
                Error::Syntax { pos, msg } => (*pos, msg.clone()),
                Error::UnknownIdentifier { name, pos } => (*pos, format!("unknown identifier `{name}`")),
                other => (0, other.to_string()),
            };
            let off = text.get(..pos.min(text.len())).map_or(0, |p| p.chars().count());
            err(self.file, line, col + off, format!("syntax error in `{text}`: {msg}"))
        })
    }

    fn exprs(&self, patch: &Patch, e: &Entry) -> Result<Sec> {
        split_list(&e.value, e.value_col)
            .iter()
            .map(|(t, c)| self.expr(patch, t, e.line, *c))
            .collect()
    }

    fn exprs_len(&self, patch: &Patch, e: &Entry, len: usize, what: &str) -> Result<Sec> {
        let v = self.exprs(patch, e)?;
        if v.len() != len {
            return Err(self.at(
                e,
                format!("shape error in {what}: expected {len} entries, found {}", v.len()),
            ));
        }
        Ok(v)
    }

    fn usize_of(&self, e: &Entry) -> Result<usize> {
        e.value
            .parse()
            .map_err(|_| self.at(e, format!("expected a nonnegative integer, found `{}`", e.value)))
    }

    fn bool_of(&self, e: &Entry) -> Result<bool> {
        match e.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(self.at(e, format!("expected true or false, found `{v}`"))),
        }
    }

    /// `i,j` with `1 ≤ i ≤ ni`, `1 ≤ j ≤ nj`, returned 0-based.
    fn pair_key(&self, e: &Entry, ni: usize, nj: usize, what: &str) -> Result<(usize, usize)> {
        let parts: Vec<&str> = e.key.split(',').map(str::trim).collect();
        let parsed: Vec<Option<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
        match parsed.as_slice() {
            [Some(i), Some(j)] if (1..=ni).contains(i) && (1..=nj).contains(j) => Ok((i - 1, j - 1)),
            [Some(_), Some(_)] => Err(self.at_key(e, format!("index `{}` out of range for {what} ({ni}×{nj})", e.key))),
            _ => Err(self.at_key(e, format!("unknown key `{}` in {what}", e.key))),
        }
    }

    /// `prefix<k>` with `1 ≤ k ≤ n`, returned 0-based.
    fn indexed_key(&self, e: &Entry, prefix: &str, n: usize, what: &str) -> Result<usize> {
        let k = e
            .key
            .strip_prefix(prefix)
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| self.at_key(e, format!("unknown key `{}` in {what}", e.key)))?;
        if !(1..=n).contains(&k) {
            return Err(self.at_key(e, format!("`{}` out of range in {what} (1..{n})", e.key)));
        }
        Ok(k - 1)
    }

    fn algebroid(&mut self, e: &Entry) -> Result<DullAlgebroid> {
        let patch = self.patch.clone().expect("checked by caller");
        let b = self.bundles.get_mut(&e.value).ok_or_else(|| {
            err(
                self.file,
                e.line,
                e.value_col,
                format!("undeclared bundle `{}`", e.value),
            )
        })?;
        b.used = true;
        DullAlgebroid::new(b.label.clone(), &patch, b.anchor.clone(), b.structure.clone())
    }

    fn subbundle(&self, e: &Entry) -> Result<Frame> {
        self.subbundles
            .get(&e.value)
            .cloned()
            .ok_or_else(|| self.at(e, format!("undeclared subbundle `{}`", e.value)))
    }

    fn bundle_state(&mut self, s: &Section) -> Result<&mut BundleState> {
        let name = s.name.clone().unwrap_or_default();
        let file = self.file;
        let b = self.bundles.get_mut(&name).ok_or_else(|| {
            err(
                file,
                s.line,
                1,
                format!("[{}] refers to undeclared bundle `{name}`", header(s)),
            )
        })?;
        if b.used {
            return Err(err(
                file,
                s.line,
                1,
                format!("[{}] comes after `{name}` was already used", header(s)),
            ));
        }
        Ok(b)
    }

    /// Rank of the bundle described by `ambient`.
    fn ambient_len(&self, e: &Entry) -> Result<usize> {
        let n = self.patch.as_ref().map_or(0, Patch::dim);
        let rank_of = |name: &str| {
            self.bundles
                .get(name)
                .map(|b| b.rank)
                .ok_or_else(|| self.at(e, format!("undeclared bundle `{name}`")))
        };
        match e.value.split_once(':') {
            None => match e.value.as_str() {
                "tm" | "tm*" => Ok(n),
                "std" => Ok(2 * n),
                v => match v.parse::<usize>() {
                    Ok(k) => Ok(k),
                    Err(_) => rank_of(v),
                },
            },
            Some(("side", a)) | Some(("core", a)) => Ok(n + rank_of(a)?),
            Some(("dual", a)) => rank_of(a),
            Some(_) => Err(self.at(e, format!("unknown ambient `{}`", e.value))),
        }
    }

    fn section(&mut self, s: &Section) -> Result<()> {
        match s.kind.as_str() {
            "patch" => self.patch_section(s),
            "bundle" => self.bundle_section(s),
            "anchor" => self.anchor_section(s),
            "bracket" => self.bracket_section(s),
            "dorfman" => self.dorfman_section(s),
            "subbundle" => self.subbundle_section(s),
            "connection" => self.connection_section(s),
            "pi" | "omega" => self.two_form_section(s),
            "sigma" => self.sigma_section(s),
            "iis" => self.iis_section(s),
            "lie_bialgebroid" => self.lie_bialgebroid_section(s),
            "bialgebra" => self.bialgebra_section(s),
            "courant" => self.courant_section(s),
            "dirac" => self.dirac_section(s),
            "triple" => self.triple_section(s),
            "bialgebroid" => self.bialgebroid_section(s),
            "checks" => self.checks_section(s),
            k => Err(self.at_section(s, format!("unknown section kind `{k}`"))),
        }
    }

    fn require_name(&self, s: &Section) -> Result<String> {
        s.name
            .clone()
            .ok_or_else(|| self.at_section(s, format!("[{}] needs a name, as in [{}.NAME]", s.kind, s.kind)))
    }

    fn forbid_name(&self, s: &Section) -> Result<()> {
        if s.name.is_some() {
            return Err(self.at_section(s, format!("[{}] takes no name", s.kind)));
        }
        Ok(())
    }

    fn keys<'e>(&self, s: &'e Section, allowed: &[&str], required: &[&str]) -> Result<HashMap<&'e str, &'e Entry>> {
        let mut m = HashMap::new();
        for e in &s.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(self.at_key(e, format!("unknown key `{}` in [{}]", e.key, header(s))));
            }
            if m.insert(e.key.as_str(), e).is_some() {
                return Err(self.at_key(e, format!("duplicate key `{}` in [{}]", e.key, header(s))));
            }
        }
        for r in required {
            if !m.contains_key(r) {
                return Err(self.at_section(s, format!("[{}] is missing `{r}`", header(s))));
            }
        }
        Ok(m)
    }

    fn patch_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        if self.patch.is_some() {
            return Err(self.at_section(s, "duplicate [patch]"));
        }
        let m = self.keys(s, &["dim", "coords"], &[])?;
        let dim = m.get("dim").map(|e| self.usize_of(e)).transpose()?;
        let patch = match m.get("coords") {
            Some(e) => {
                let names: Vec<String> = split_list(&e.value, e.value_col).into_iter().map(|(n, _)| n).collect();
                let p = Patch::new(names).map_err(|x| self.at(e, x.to_string()))?;
                if let Some(d) = dim {
                    if d != p.dim() {
                        return Err(self.at(
                            e,
                            format!("shape error in [patch]: dim = {d} but {} coordinates", p.dim()),
                        ));
                    }
                }
                p
            }
            None => match dim {
                Some(d) if (1..=3).contains(&d) => Patch::standard(d),
                Some(_) => return Err(self.at_section(s, "[patch] with dim > 3 needs explicit coords")),
                None => return Err(self.at_section(s, "[patch] needs dim or coords")),
            },
        };
        self.patch = Some(patch);
        Ok(())
    }

    fn bundle_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let n = self.patch(s)?.dim();
        if self.bundles.contains_key(&name) {
            return Err(self.at_section(s, format!("bundle `{name}` declared twice")));
        }
        let m = self.keys(s, &["rank", "label", "tangent"], &[])?;
        let tangent = m.get("tangent").map(|e| self.bool_of(e)).transpose()?.unwrap_or(false);
        let rank = match (m.get("rank"), tangent) {
            (Some(e), true) => {
                let r = self.usize_of(e)?;
                if r != n {
                    return Err(self.at(
                        e,
                        format!("shape error in [bundle.{name}]: tangent bundle has rank {n}"),
                    ));
                }
                r
            }
            (Some(e), false) => self.usize_of(e)?,
            (None, true) => n,
            (None, false) => return Err(self.at_section(s, format!("[bundle.{name}] is missing `rank`"))),
        };
        let anchor = if tangent {
            (0..n).map(|i| section::basis(n, i)).collect()
        } else {
            vec![section::zero(rank); n]
        };
        let label = m.get("label").map_or_else(|| name.clone(), |e| e.value.clone());
        self.bundles.insert(
            name,
            BundleState {
                rank,
                label,
                anchor,
                structure: vec![vec![section::zero(rank); rank]; rank],
                used: false,
            },
        );
        Ok(())
    }

    fn anchor_section(&mut self, s: &Section) -> Result<()> {
        self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let n = patch.dim();
        let rank = self.bundle_state(s)?.rank;
        let mut anchor = vec![section::zero(rank); n];
        let what = format!("[{}] (rank {rank})", header(s));
        for e in &s.entries {
            let k = self.indexed_key(e, "row", n, &what)?;
            anchor[k] = self.exprs_len(&patch, e, rank, &what)?;
        }
        self.bundle_state(s)?.anchor = anchor;
        Ok(())
    }

    fn bracket_section(&mut self, s: &Section) -> Result<()> {
        self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let rank = self.bundle_state(s)?.rank;
        let what = format!("[{}]", header(s));
        let mut skew = false;
        let mut table = vec![vec![None::<Sec>; rank]; rank];
        let mut lines = vec![vec![0usize; rank]; rank];
        for e in &s.entries {
            if e.key == "skew" {
                skew = self.bool_of(e)?;
                continue;
            }
            let (i, j) = self.pair_key(e, rank, rank, &what)?;
            if table[i][j].is_some() {
                return Err(self.at_key(e, format!("duplicate entry `{}` in {what}", e.key)));
            }
            table[i][j] = Some(self.exprs_len(&patch, e, rank, &what)?);
            lines[i][j] = e.line;
        }
        let mut structure = vec![vec![section::zero(rank); rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                structure[i][j] = match (&table[i][j], &table[j][i]) {
                    (Some(v), Some(w)) if skew && section::add(v, w).iter().any(|c| !c.is_zero()) => {
                        return Err(err(
                            self.file,
                            lines[i][j].max(lines[j][i]),
                            1,
                            format!(
                                "{what}: entries {},{} and {},{} are not skew",
                                i + 1,
                                j + 1,
                                j + 1,
                                i + 1
                            ),
                        ));
                    }
                    (Some(v), _) => v.clone(),
                    (None, Some(w)) if skew => section::neg(w),
                    _ => section::zero(rank),
                };
            }
        }
        self.bundle_state(s)?.structure = structure;
        Ok(())
    }

    fn dorfman_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let m = self.keys_prefix(s, &["algebroid"])?;
        let ae = m.ok_or_else(|| self.at_section(s, format!("[{}] is missing `algebroid`", header(s))))?;
        let alg = self.algebroid(ae)?;
        let l = alg.layout().len();
        let what = format!("[{}] (side and core of rank {l})", header(s));
        let mut table = vec![vec![section::zero(l); l]; l];
        for e in s.entries.iter().filter(|e| e.key != "algebroid") {
            let (i, j) = self.pair_key(e, l, l, &what)?;
            table[i][j] = self.exprs_len(&patch, e, l, &what)?;
        }
        let d = DorfmanConnection::new(&patch, alg.rank(), table).map_err(|x| self.at_section(s, x.to_string()))?;
        self.dorfman.insert(name.clone(), (ae.value.clone(), d.clone()));
        self.inst.dorfman.push((name, d));
        Ok(())
    }

    /// The single named key of a section that otherwise holds indexed entries.
    fn keys_prefix<'e>(&self, s: &'e Section, named: &[&str]) -> Result<Option<&'e Entry>> {
        Ok(s.entries.iter().find(|e| named.contains(&e.key.as_str())))
    }

    fn subbundle_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let ae = self
            .keys_prefix(s, &["ambient"])?
            .ok_or_else(|| self.at_section(s, format!("[{}] is missing `ambient`", header(s))))?;
        let len = self.ambient_len(ae)?;
        let what = format!("[{}] (ambient rank {len})", header(s));
        let rows: Vec<&Entry> = s.entries.iter().filter(|e| e.key != "ambient").collect();
        let mut vectors = vec![None; rows.len()];
        for e in &rows {
            let k = self.indexed_key(e, "v", rows.len(), &what)?;
            if vectors[k].is_some() {
                return Err(self.at_key(e, format!("duplicate `{}` in {what}", e.key)));
            }
            vectors[k] = Some(self.exprs_len(&patch, e, len, &what)?);
        }
        let vectors: Vec<Sec> = vectors
            .into_iter()
            .map(|v| v.expect("indices are a permutation"))
            .collect();
        let f = Frame::new(vectors, len).map_err(|x| self.at_section(s, format!("[{}]: {x}", header(s))))?;
        self.subbundles.insert(name.clone(), f.clone());
        self.inst.subbundles.push((name, f));
        Ok(())
    }

    fn connection_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let n = patch.dim();
        let be = self
            .keys_prefix(s, &["bundle"])?
            .ok_or_else(|| self.at_section(s, format!("[{}] is missing `bundle`", header(s))))?;
        let rank = self
            .bundles
            .get(&be.value)
            .map(|b| b.rank)
            .ok_or_else(|| self.at(be, format!("undeclared bundle `{}`", be.value)))?;
        let what = format!("[{}] (∇_(∂i) e_j, {n}×{rank})", header(s));
        let mut gamma = vec![vec![section::zero(rank); rank]; n];
        for e in s.entries.iter().filter(|e| e.key != "bundle") {
            let (i, j) = self.pair_key(e, n, rank, &what)?;
            gamma[i][j] = self.exprs_len(&patch, e, rank, &what)?;
        }
        let c = LinearConnection::new(n, rank, gamma).map_err(|x| self.at_section(s, x.to_string()))?;
        self.connections.insert(name.clone(), (be.value.clone(), c.clone()));
        self.inst.connections.push((name, c));
        Ok(())
    }

    fn two_form_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        let patch = self.patch(s)?.clone();
        let n = patch.dim();
        let what = format!("[{}]", s.kind);
        let mut w = vec![vec![Scalar::zero(); n]; n];
        let mut seen = vec![vec![false; n]; n];
        for e in &s.entries {
            let (i, j) = self.pair_key(e, n, n, &what)?;
            if i == j || seen[i][j] || seen[j][i] {
                return Err(self.at_key(e, format!("{what}: give each pair i<j once, off the diagonal")));
            }
            seen[i][j] = true;
            let f = self.expr(&patch, &e.value, e.line, e.value_col)?;
            w[j][i] = -&f;
            w[i][j] = f;
        }
        let slot = if s.kind == "pi" {
            &mut self.inst.pi
        } else {
            &mut self.inst.omega
        };
        if slot.is_some() {
            return Err(err(self.file, s.line, 1, format!("duplicate {what}")));
        }
        *slot = Some(w);
        Ok(())
    }

    fn sigma_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        let patch = self.patch(s)?.clone();
        let n = patch.dim();
        let ae = self
            .keys_prefix(s, &["algebroid"])?
            .ok_or_else(|| self.at_section(s, "[sigma] is missing `algebroid`"))?;
        let alg = self.algebroid(ae)?;
        let r = alg.rank();
        let what = format!("[sigma] ({n}×{r})");
        let mut sigma = vec![section::zero(r); n];
        for e in s.entries.iter().filter(|e| e.key != "algebroid") {
            let k = self.indexed_key(e, "row", n, &what)?;
            sigma[k] = self.exprs_len(&patch, e, r, &what)?;
        }
        self.inst.sigma = Some(IMTwoForm::new(alg, sigma).map_err(|x| self.at_section(s, x.to_string()))?);
        Ok(())
    }

    fn iis_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        self.patch(s)?;
        let m = self.keys(
            s,
            &["algebroid", "f_m", "j", "connection"],
            &["algebroid", "f_m", "j", "connection"],
        )?;
        let alg = self.algebroid(m["algebroid"])?;
        let f_m = self.subbundle(m["f_m"])?;
        let j = self.subbundle(m["j"])?;
        let ce = m["connection"];
        let (bundle, conn) = self
            .connections
            .get(&ce.value)
            .cloned()
            .ok_or_else(|| self.at(ce, format!("undeclared connection `{}`", ce.value)))?;
        if bundle != m["algebroid"].value {
            return Err(self.at(
                ce,
                format!("connection `{}` is on `{bundle}`, not on the algebroid", ce.value),
            ));
        }
        self.inst.iis = Some(IISData::new(alg, f_m, j, conn).map_err(|x| self.at_section(s, format!("[iis]: {x}")))?);
        Ok(())
    }

    fn lie_bialgebroid_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        self.patch(s)?;
        let m = self.keys(s, &["a", "astar"], &["a", "astar"])?;
        let a = self.algebroid(m["a"])?;
        let astar = self.algebroid(m["astar"])?;
        self.inst.lie_bialgebroid =
            Some(LieBialgebroidData::new(a, astar).map_err(|x| self.at_section(s, format!("[lie_bialgebroid]: {x}")))?);
        Ok(())
    }

    fn bialgebra_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        let patch = self.patch(s)?.clone();
        let named: Vec<&Entry> = s.entries.iter().filter(|e| e.key == "g" || e.key == "p").collect();
        let ge = named
            .iter()
            .find(|e| e.key == "g")
            .ok_or_else(|| self.at_section(s, "[bialgebra] is missing `g`"))?;
        let pe = named
            .iter()
            .find(|e| e.key == "p")
            .ok_or_else(|| self.at_section(s, "[bialgebra] is missing `p`"))?;
        let g = self.algebroid(ge)?;
        let p = self.algebroid(pe)?;
        let what = format!("[bialgebra] (ι: p → g*, {}×{})", p.rank(), g.rank());
        let rows: Vec<&Entry> = s.entries.iter().filter(|e| e.key != "g" && e.key != "p").collect();
        let mut iota = vec![section::zero(g.rank()); p.rank()];
        for e in rows {
            let k = self.indexed_key(e, "iota", p.rank(), &what)?;
            iota[k] = self.exprs_len(&patch, e, g.rank(), &what)?;
        }
        self.inst.bialgebra = Some(
            DiracBialgebraData::from_parts(g, p, iota).map_err(|x| self.at_section(s, format!("[bialgebra]: {x}")))?,
        );
        Ok(())
    }

    fn courant_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let m = self.keys(s, &["kind", "algebroid", "a", "astar"], &["kind"])?;
        let kind = m["kind"];
        let c = match kind.value.as_str() {
            "standard" => standard_courant(&patch),
            "degenerate" => {
                let ae = m
                    .get("algebroid")
                    .ok_or_else(|| self.at_section(s, "degenerate kind needs `algebroid`"))?;
                degenerate_courant(&self.algebroid(ae)?)
            }
            "double" => {
                let (Some(a), Some(b)) = (m.get("a"), m.get("astar")) else {
                    return Err(self.at_section(s, "double kind needs `a` and `astar`"));
                };
                let lb = LieBialgebroidData::new(self.algebroid(a)?, self.algebroid(b)?)
                    .map_err(|x| self.at_section(s, x.to_string()))?;
                courant_double(&lb)
            }
            k => {
                return Err(self.at(
                    kind,
                    format!("unknown Courant kind `{k}` (standard, degenerate, double)"),
                ))
            }
        };
        self.courants.insert(name.clone(), self.inst.courants.len());
        self.inst.courants.push((name, c));
        Ok(())
    }

    fn dirac_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        let patch = self.patch(s)?.clone();
        let m = self.keys(s, &["courant", "subbundle", "from"], &["courant"])?;
        let ce = m["courant"];
        let idx = *self
            .courants
            .get(&ce.value)
            .ok_or_else(|| self.at(ce, format!("undeclared Courant algebroid `{}`", ce.value)))?;
        let len = self.inst.courants[idx].1.len();
        let vectors = match (m.get("subbundle"), m.get("from")) {
            (Some(e), None) => self.subbundle(e)?.vectors().to_vec(),
            (None, Some(e)) => {
                let sub = match e.value.split_once(':') {
                    None if e.value == "pi" => {
                        let pi = self.inst.pi.as_ref().ok_or_else(|| self.at(e, "no [pi] declared"))?;
                        dirac_from_poisson(&patch, pi)
                    }
                    None if e.value == "omega" => {
                        let w = self
                            .inst
                            .omega
                            .as_ref()
                            .ok_or_else(|| self.at(e, "no [omega] declared"))?;
                        dirac_from_2form(&patch, w)
                    }
                    Some(("foliation", f)) => {
                        let fr = self
                            .subbundles
                            .get(f)
                            .ok_or_else(|| self.at(e, format!("undeclared subbundle `{f}`")))?;
                        dirac_from_foliation(&patch, fr)
                    }
                    _ => return Err(self.at(e, format!("unknown source `{}` (pi, omega, foliation:NAME)", e.value))),
                };
                sub.map_err(|x| self.at(e, x.to_string()))?.vectors().to_vec()
            }
            _ => return Err(self.at_section(s, format!("[dirac.{name}] needs exactly one of `subbundle`, `from`"))),
        };
        if vectors.iter().any(|v| v.len() != len) {
            return Err(self.at_section(
                s,
                format!("shape error in [dirac.{name}]: vectors must have length {len}"),
            ));
        }
        self.inst.diracs.push(DiracRequest {
            name,
            courant: ce.value.clone(),
            vectors,
        });
        Ok(())
    }

    fn triple_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        self.patch(s)?;
        let m = self.keys(s, &["algebroid", "u", "k", "dorfman"], &["algebroid", "u", "dorfman"])?;
        let alg = self.algebroid(m["algebroid"])?;
        let u = self.subbundle(m["u"])?;
        let de = m["dorfman"];
        let (on, delta) = self
            .dorfman
            .get(&de.value)
            .cloned()
            .ok_or_else(|| self.at(de, format!("undeclared Dorfman connection `{}`", de.value)))?;
        if on != m["algebroid"].value {
            return Err(self.at(de, format!("Dorfman connection `{}` is over `{on}`", de.value)));
        }
        let t = match m.get("k") {
            Some(ke) => LADiracTriple::with_core(alg, u, self.subbundle(ke)?, delta),
            None => LADiracTriple::new(alg, u, delta),
        }
        .map_err(|x| self.at_section(s, format!("[triple.{name}]: {x}")))?;
        self.inst.triples.push((name, t));
        Ok(())
    }

    fn bialgebroid_section(&mut self, s: &Section) -> Result<()> {
        let name = self.require_name(s)?;
        self.patch(s)?;
        let m = self.keys(s, &["a", "u", "iota"], &["a", "u", "iota"])?;
        let a = self.algebroid(m["a"])?;
        let u = self.algebroid(m["u"])?;
        let iota = self.subbundle(m["iota"])?.vectors().to_vec();
        let db =
            DiracBialgebroid::new(a, u, iota).map_err(|x| self.at_section(s, format!("[bialgebroid.{name}]: {x}")))?;
        self.inst.bialgebroids.push((name, db));
        Ok(())
    }

    fn checks_section(&mut self, s: &Section) -> Result<()> {
        self.forbid_name(s)?;
        let m = self.keys(s, &["suites"], &["suites"])?;
        let e = m["suites"];
        let mut v = Vec::new();
        for (item, col) in split_list(&e.value, e.value_col) {
            if !super::SUITES.contains(&item.as_str()) || item == "all" {
                return Err(err(self.file, e.line, col, format!("unknown suite `{item}`")));
            }
            v.push(item);
        }
        self.inst.suites = Some(v);
        Ok(())
    }
}

fn header(s: &Section) -> String {
    match &s.name {
        Some(n) => format!("{}.{n}", s.kind),
        None => s.kind.clone(),
    }
}

/// Parses and validates instance text; `file` names the source in
/// diagnostics.
pub fn parse_instance(file: &str, text: &str) -> Result<Instance> {
    let sections = lex(file, text)?;
    let mut ctx = Ctx {
        file,
        patch: None,
        bundles: HashMap::new(),
        subbundles: HashMap::new(),
        dorfman: HashMap::new(),
        connections: HashMap::new(),
        courants: HashMap::new(),
        inst: Instance {
            path: file.to_string(),
            ..Default::default()
        },
    };
    let mut order = Vec::new();
    for s in &sections {
        ctx.section(s)?;
        if s.kind == "bundle" {
            order.push(s.name.clone().expect("checked"));
        }
    }
    if ctx.patch.is_none() {
        return Err(err(file, 1, 1, "missing [patch]"));
    }
    let patch = ctx.patch.clone().expect("checked");
    for name in order {
        let b = &ctx.bundles[&name];
        let alg = DullAlgebroid::new(b.label.clone(), &patch, b.anchor.clone(), b.structure.clone())?;
        ctx.inst.algebroids.push((name, alg));
    }
    ctx.inst.patch = Some(patch);
    Ok(ctx.inst)
}

pub fn ingest(path: &str) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    parse_instance(path, &text)
}

fn list(patch: &Patch, v: &[Scalar]) -> String {
    patch.show_all(v).join(", ")
}

fn emit_patch(out: &mut String, patch: &Patch) {
    out.push_str(&format!("[patch]\ncoords = {}\n\n", patch.names().join(", ")));
}

fn emit_algebroid(out: &mut String, name: &str, alg: &DullAlgebroid) {
    let p = &alg.patch;
    out.push_str(&format!(
        "[bundle.{name}]\nrank = {}\nlabel = {}\n\n",
        alg.rank(),
        alg.name
    ));
    out.push_str(&format!("[anchor.{name}]\n"));
    for (k, row) in alg.anchor.iter().enumerate() {
        out.push_str(&format!("row{} = {}\n", k + 1, list(p, row)));
    }
    out.push('\n');
    out.push_str(&format!("[bracket.{name}]\n"));
    for (i, row) in alg.structure.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !section::is_zero(v) {
                out.push_str(&format!("{},{} = {}\n", i + 1, j + 1, list(p, v)));
            }
        }
    }
    out.push('\n');
}

fn emit_subbundle(out: &mut String, name: &str, ambient: &str, f: &Frame, p: &Patch) {
    out.push_str(&format!("[subbundle.{name}]\nambient = {ambient}\n"));
    for (k, v) in f.vectors().iter().enumerate() {
        out.push_str(&format!("v{} = {}\n", k + 1, list(p, v)));
    }
    out.push('\n');
}

fn emit_triple(out: &mut String, t: &LADiracTriple) {
    let p = &t.alg.patch;
    out.push_str("[dorfman.Delta]\nalgebroid = A\n");
    for (i, row) in t.delta.table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !section::is_zero(v) {
                out.push_str(&format!("{},{} = {}\n", i + 1, j + 1, list(p, v)));
            }
        }
    }
    out.push('\n');
    emit_subbundle(out, "U", "side:A", &t.u, p);
    emit_subbundle(out, "K", "core:A", &t.k, p);
    out.push_str("[triple.T]\nalgebroid = A\nu = U\nk = K\ndorfman = Delta\n");
}

/// Instance text for an example-family instance; ingesting it rebuilds the
/// same object.
pub fn emit(inst: &ZooInstance) -> String {
    let mut out = String::new();
    let p = inst.patch().clone();
    let cfg = CheckConfig::default();
    emit_patch(&mut out, &p);
    match inst {
        ZooInstance::LieBialgebroid(lb) => {
            emit_algebroid(&mut out, "A", &lb.alg_a);
            emit_algebroid(&mut out, "Astar", &lb.alg_astar);
            out.push_str("[lie_bialgebroid]\na = A\nastar = Astar\n\n");
            out.push_str("[courant.D]\nkind = double\na = A\nastar = Astar\n\n");
            let conn = LinearConnection::trivial(p.dim(), lb.rank());
            if let Ok(t) = adapted_dorfman_poisson(lb, &conn, &cfg).and_then(|(d, _)| poisson_triple(lb, d)) {
                emit_triple(&mut out, &t);
            }
        }
        ZooInstance::Im2Form(im) => {
            emit_algebroid(&mut out, "A", &im.alg);
            out.push_str("[sigma]\nalgebroid = A\n");
            for (k, row) in im.sigma.iter().enumerate() {
                out.push_str(&format!("row{} = {}\n", k + 1, list(&p, row)));
            }
            out.push('\n');
            let conn = LinearConnection::trivial(p.dim(), im.alg.rank());
            if let Ok(t) = adapted_dorfman_presymplectic(im, &conn, &cfg).and_then(|(d, _)| presymplectic_triple(im, d))
            {
                emit_triple(&mut out, &t);
            }
        }
        ZooInstance::Iis(iis) => {
            emit_algebroid(&mut out, "A", &iis.alg);
            emit_subbundle(&mut out, "F", "tm", &iis.f_m, &p);
            emit_subbundle(&mut out, "J", "A", &iis.j, &p);
            out.push_str("[connection.nabla]\nbundle = A\n");
            for (i, row) in iis.conn.gamma.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !section::is_zero(v) {
                        out.push_str(&format!("{},{} = {}\n", i + 1, j + 1, list(&p, v)));
                    }
                }
            }
            out.push_str("\n[iis]\nalgebroid = A\nf_m = F\nj = J\nconnection = nabla\n");
        }
        ZooInstance::Bialgebra(db) => {
            emit_algebroid(&mut out, "g", &db.g);
            emit_algebroid(&mut out, "p", &db.p);
            out.push_str("[bialgebra]\ng = g\np = p\n");
            for (k, v) in db.iota.iter().enumerate() {
                out.push_str(&format!("iota{} = {}\n", k + 1, list(&p, v)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::PRESETS;

    #[test]
    fn presets_round_trip() {
        for pr in PRESETS {
            let inst = pr.build().unwrap();
            let text = emit(&inst);
            let back = parse_instance("preset", &text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", pr.name));
            let fam = back.families();
            assert_eq!(fam.len(), 1, "{}", pr.name);
            assert_eq!(fam[0], inst, "{}", pr.name);
            assert_eq!(emit(&fam[0]), text);
            let triples = matches!(inst, ZooInstance::LieBialgebroid(_) | ZooInstance::Im2Form(_));
            assert_eq!(back.triples.len(), usize::from(triples), "{}", pr.name);
        }
    }

    #[test]
    fn rank_mismatched_anchor() {
        let text = "[patch]\ncoords = x, y\n[bundle.A]\nrank = 2\n[anchor.A]\nrow1 = 1, 0, 0\n";
        let e = parse_instance("f.inst", text).unwrap_err().to_string();
        assert!(e.starts_with("f.inst:6:8:"), "{e}");
        assert!(e.contains("shape error in [anchor.A]"), "{e}");
    }

    #[test]
    fn syntax_error_position() {
        let text = "[patch]\ncoords = x, y\n[bundle.A]\nrank = 1\n[anchor.A]\nrow1 = x^\n";
        let e = parse_instance("f.inst", text).unwrap_err().to_string();
        assert!(e.starts_with("f.inst:6:"), "{e}");
        assert!(e.contains("syntax error in `x^`"), "{e}");
    }

    #[test]
    fn undeclared_reference() {
        let text = "[patch]\ndim = 2\n[sigma]\nalgebroid = B\n";
        let e = parse_instance("f.inst", text).unwrap_err().to_string();
        assert!(e.contains("f.inst:4:13: undeclared bundle `B`"), "{e}");
    }

    #[test]
    fn skew_completion_and_duplicates() {
        let text = "[patch]\ndim = 2\n[bundle.A]\nrank = 2\n[bracket.A]\nskew = true\n1,2 = 0, y\n";
        let inst = parse_instance("f", text).unwrap();
        let a = inst.algebroid("A").unwrap();
        assert_eq!(a.structure[1][0][1], -&Scalar::var(1));
        let bad = "[patch]\ndim = 2\n[bundle.A]\nrank = 2\n[bracket.A]\n1,2 = 0, y\n1,2 = 0, 1\n";
        assert!(parse_instance("f", bad)
            .unwrap_err()
            .to_string()
            .contains("duplicate entry"));
    }

    #[test]
    fn late_anchor_is_rejected() {
        let text = "[patch]\ndim = 2\n[bundle.A]\nrank = 2\n[sigma]\nalgebroid = A\n[anchor.A]\nrow1 = 1, 0\n";
        let e = parse_instance("f", text).unwrap_err().to_string();
        assert!(e.contains("already used"), "{e}");
    }
}
