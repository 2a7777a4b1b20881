//! Named instances of each family and the report that runs every check of
//! the family on an instance.

use super::*;
use crate::algebroid::{DullBracket, LinearConnection};
use crate::bialgebroid::{check_la_dirac, check_manin_pair, verify_appendix_lemmas, DiracBialgebroid};
use crate::cartan::TwoForm;
use crate::check::{all_pass, prefixed, Outcome};
use crate::error::{Error, Result};
use crate::sampling::CheckConfig;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum ZooInstance {
    LieBialgebroid(LieBialgebroidData),
    Im2Form(IMTwoForm),
    Iis(IISData),
    Bialgebra(DiracBialgebraData),
}

impl ZooInstance {
    pub fn family(&self) -> &'static str {
        match self {
            ZooInstance::LieBialgebroid(_) => "lie-bialgebroid",
            ZooInstance::Im2Form(_) => "im2form",
            ZooInstance::Iis(_) => "iis",
            ZooInstance::Bialgebra(_) => "bialgebra",
        }
    }

    pub fn patch(&self) -> &Patch {
        match self {
            ZooInstance::LieBialgebroid(lb) => lb.patch(),
            ZooInstance::Im2Form(im) => im.patch(),
            ZooInstance::Iis(iis) => iis.patch(),
            ZooInstance::Bialgebra(db) => &db.g.patch,
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// Whether every check of the family is expected to pass.
    pub positive: bool,
    build: fn() -> Result<ZooInstance>,
}

impl Preset {
    pub fn build(&self) -> Result<ZooInstance> {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "poisson-xy",
        summary: "(TM, T*M) for π = x ∂x∧∂y on ℝ²",
        positive: true,
        build: poisson_xy,
    },
    Preset {
        name: "presymplectic-dxdy",
        summary: "A = TM, σ = ω^♭ for ω = dx∧dy on ℝ²",
        positive: true,
        build: presymplectic_dxdy,
    },
    Preset {
        name: "nonclosed-zdxdy",
        summary: "A = TM, σ = ω^♭ for ω = z dx∧dy on ℝ³ (not closed)",
        positive: false,
        build: nonclosed_zdxdy,
    },
    Preset {
        name: "foliation-x",
        summary: "A = TM on ℝ², F_M = J = span{∂x}, trivial connection",
        positive: true,
        build: foliation_x,
    },
    Preset {
        name: "iis-curved-negative",
        summary: "A = TM on ℝ², F_M = TM, J = span{∂x}, ∇̃_{∂y}e₂ = x e₂",
        positive: false,
        build: iis_curved_negative,
    },
    Preset {
        name: "aff1-bialgebra",
        summary: "g = aff(1), [e₁,e₂] = e₂, p = span{e₁*}",
        positive: true,
        build: aff1_bialgebra,
    },
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn preset(name: &str) -> Result<ZooInstance> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Precondition(format!("unknown preset `{name}`; known: {}", preset_names().join(", "))))?
        .build()
}

fn two_form(patch: &Patch, i: usize, j: usize, f: &str) -> Result<TwoForm> {
    let n = patch.dim();
    let mut w = vec![vec![Scalar::zero(); n]; n];
    let f = patch.parse(f)?;
    w[j][i] = -&f;
    w[i][j] = f;
    Ok(w)
}

fn poisson_xy() -> Result<ZooInstance> {
    let p = Patch::standard(2);
    Ok(ZooInstance::LieBialgebroid(LieBialgebroidData::poisson(
        &p,
        &two_form(&p, 0, 1, "x")?,
    )?))
}

fn presymplectic_dxdy() -> Result<ZooInstance> {
    let p = Patch::standard(2);
    Ok(ZooInstance::Im2Form(IMTwoForm::from_two_form(
        &p,
        &two_form(&p, 0, 1, "1")?,
    )?))
}

fn nonclosed_zdxdy() -> Result<ZooInstance> {
    let p = Patch::standard(3);
    Ok(ZooInstance::Im2Form(IMTwoForm::from_two_form(
        &p,
        &two_form(&p, 0, 1, "z")?,
    )?))
}

fn dx_frame() -> Result<Frame> {
    Frame::new(vec![section::basis(2, 0)], 2)
}

fn foliation_x() -> Result<ZooInstance> {
    let alg = DullAlgebroid::tangent(&Patch::standard(2));
    Ok(ZooInstance::Iis(IISData::new(
        alg,
        dx_frame()?,
        dx_frame()?,
        LinearConnection::trivial(2, 2),
    )?))
}

fn iis_curved_negative() -> Result<ZooInstance> {
    let alg = DullAlgebroid::tangent(&Patch::standard(2));
    let mut conn = LinearConnection::trivial(2, 2);
    conn.gamma[1][1] = vec![Scalar::zero(), Scalar::var(0)];
    Ok(ZooInstance::Iis(IISData::new(
        alg,
        Frame::standard(2),
        dx_frame()?,
        conn,
    )?))
}

fn aff1_bialgebra() -> Result<ZooInstance> {
    let g = vec![vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]];
    Ok(ZooInstance::Bialgebra(DiracBialgebraData::new(
        &g,
        &[vec![vec![0]]],
        &[vec![1, 0]],
    )?))
}

/// The Dirac bialgebroid of an instance.
pub fn instance_bialgebroid(inst: &ZooInstance, cfg: &CheckConfig) -> Result<DiracBialgebroid> {
    match inst {
        ZooInstance::LieBialgebroid(lb) => Ok(bialgebroid_from_lie_bialgebroid(lb)?.0),
        ZooInstance::Im2Form(im) => Ok(bialgebroid_from_im2form(im)?.0),
        ZooInstance::Iis(iis) => Ok(bialgebroid_from_iis(iis, cfg)?.0),
        ZooInstance::Bialgebra(db) => db.bialgebroid(),
    }
}

fn or_error<T>(name: &str, r: Result<T>, f: impl FnOnce(T) -> Vec<Outcome>) -> Vec<Outcome> {
    match r {
        Ok(x) => f(x),
        Err(e) => vec![Outcome::error(name, e.to_string())],
    }
}

/// Every check of the instance's family, followed by the generic pipeline
/// on its Dirac bialgebroid when the family checks pass.
pub fn check_instance(inst: &ZooInstance, cfg: &CheckConfig) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut db = None;
    match inst {
        ZooInstance::LieBialgebroid(lb) => {
            out.extend(check_lie_bialgebroid(lb, cfg));
            out.push(check_anchor_anomaly(lb));
            let conn = LinearConnection::trivial(lb.patch().dim(), lb.rank());
            out.extend(or_error(
                "poisson.adapted_formula",
                adapted_dorfman_poisson(lb, &conn, cfg),
                |(delta, o)| {
                    let mut v = vec![o, check_poisson_restriction(lb, &delta, cfg)];
                    v.extend(or_error("poisson.triple", poisson_triple(lb, delta), |t| {
                        let mut w = prefixed("poisson.triple", check_la_dirac(&t, cfg));
                        w.extend(prefixed("poisson.triple", verify_appendix_lemmas(&t, cfg)));
                        w
                    }));
                    v
                },
            ));
            if all_pass(&out) {
                out.push(check_poisson_phi_identities(lb, cfg));
                out.extend(or_error(
                    "poisson.manin",
                    bialgebroid_from_lie_bialgebroid(lb),
                    |(d, mp)| {
                        db = Some(d);
                        prefixed("poisson", check_manin_pair(&mp, cfg))
                    },
                ));
            }
        }
        ZooInstance::Im2Form(im) => {
            out.extend(check_im2form(im, cfg));
            out.extend(or_error("im2form.morphism", check_im2form_morphism(im, cfg), |v| {
                prefixed("im2form", v)
            }));
            let conn = LinearConnection::trivial(im.patch().dim(), im.alg.rank());
            out.extend(or_error(
                "presymplectic.adapted_formula",
                adapted_dorfman_presymplectic(im, &conn, cfg),
                |(delta, o)| {
                    let mut v = vec![o, check_presymplectic_restriction(im, &delta, cfg)];
                    v.extend(or_error(
                        "presymplectic.triple",
                        presymplectic_triple(im, delta.clone()),
                        |t| {
                            let mut w = prefixed("presymplectic.triple", check_la_dirac(&t, cfg));
                            w.extend(prefixed("presymplectic.triple", verify_appendix_lemmas(&t, cfg)));
                            w
                        },
                    ));
                    v.push(check_sign_reconciliation(im, delta));
                    v
                },
            ));
            if all_pass(&out) {
                out.extend(or_error("im2form.manin", bialgebroid_from_im2form(im), |(d, mp)| {
                    db = Some(d);
                    prefixed("im2form", check_manin_pair(&mp, cfg))
                }));
            }
        }
        ZooInstance::Iis(iis) => {
            out.extend(check_iis(iis, cfg));
            out.extend(check_abar(iis, cfg));
            out.extend(check_iis_bialgebroid(iis, cfg));
            out.extend(or_error(
                "iis.adapted_formula",
                adapted_dorfman_iis(iis, cfg),
                |(delta, o)| {
                    let mut v = vec![o, check_iis_restriction(iis, &delta, cfg)];
                    v.extend(or_error("iis.triple", iis_triple(iis, delta), |t| {
                        prefixed("iis.triple", check_la_dirac(&t, cfg))
                    }));
                    v
                },
            ));
            if all_pass(&out) {
                db = bialgebroid_from_iis(iis, cfg).ok().map(|x| x.0);
            }
        }
        ZooInstance::Bialgebra(d) => {
            out.extend(check_dirac_bialgebra(d, cfg));
            if all_pass(&out) {
                out.extend(or_error("bialgebra.bialgebroid", d.bialgebroid(), |b| {
                    db = Some(b);
                    Vec::new()
                }));
            }
        }
    }
    if let Some(d) = db {
        out.extend(bialgebroid_pipeline(&d, cfg));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        for p in PRESETS {
            let inst = p.build().unwrap();
            assert_eq!(preset(p.name).unwrap().family(), inst.family());
        }
        assert!(preset("nope").is_err());
    }
}
