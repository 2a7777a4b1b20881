//! Patches, trivial bundles, sections, frames and subbundles.

pub mod matrix;
mod patch;
pub mod section;
mod subbundle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use matrix::Mat;
pub use patch::Patch;
pub use section::Sec;
pub use subbundle::{complement, degenerate_pairing, membership, same_span, Frame, Layout, Membership};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialBundle {
    pub name: String,
    pub patch: Patch,
    pub rank: usize,
}

impl TrivialBundle {
    pub fn new(name: impl Into<String>, patch: &Patch, rank: usize) -> Self {
        TrivialBundle {
            name: name.into(),
            patch: patch.clone(),
            rank,
        }
    }

    pub fn tangent(patch: &Patch) -> Self {
        Self::new("TM", patch, patch.dim())
    }

    pub fn cotangent(patch: &Patch) -> Self {
        Self::new("T*M", patch, patch.dim())
    }

    pub fn dual(&self) -> Self {
        Self::new(format!("{}*", self.name), &self.patch, self.rank)
    }

    pub fn section(&self, components: Vec<Scalar>) -> Result<Sec> {
        if components.len() != self.rank {
            return Err(Error::Shape(format!(
                "section of {} needs {} components, got {}",
                self.name,
                self.rank,
                components.len()
            )));
        }
        Ok(components)
    }
}

/// `b1 ⊕ b2` with components ordered `(b1-part, b2-part)`.
pub fn direct_sum(b1: &TrivialBundle, b2: &TrivialBundle) -> Result<TrivialBundle> {
    if b1.patch != b2.patch {
        return Err(Error::PatchMismatch(format!(
            "{} and {} live on different patches",
            b1.name, b2.name
        )));
    }
    Ok(TrivialBundle::new(
        format!("{}+{}", b1.name, b2.name),
        &b1.patch,
        b1.rank + b2.rank,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subbundle {
    pub ambient: TrivialBundle,
    pub frame: Frame,
}

impl Subbundle {
    pub fn new(ambient: TrivialBundle, vectors: Vec<Sec>) -> Result<Self> {
        let frame = Frame::new(vectors, ambient.rank)?;
        Ok(Subbundle { ambient, frame })
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn vectors(&self) -> &[Sec] {
        self.frame.vectors()
    }

    pub fn membership(&self, s: &[Scalar]) -> Membership {
        membership(s, &self.frame)
    }

    pub fn complement(&self) -> Frame {
        complement(&self.frame)
    }
}

/// `⟨(X,α),(a,θ)⟩ = θ(X) + α(a)` for `TM ⊕ A*` against `A ⊕ T*M`.
pub fn canonical_pairing(u: &[Scalar], t: &[Scalar], dim: usize) -> Result<Scalar> {
    if u.len() != t.len() || u.len() < dim {
        return Err(Error::Shape(format!(
            "cannot pair sections of ranks {} and {}",
            u.len(),
            t.len()
        )));
    }
    Ok(Layout::new(dim, u.len() - dim).pair(u, t))
}

/// `U° ⊆ A ⊕ T*M` for a subbundle `U ⊆ TM ⊕ A*`.
pub fn annihilator(u: &Subbundle, dim: usize) -> Result<Subbundle> {
    let layout = Layout::new(dim, u.ambient.rank - dim);
    let frame = layout.annihilator_of_side(&u.frame)?;
    let ambient = TrivialBundle::new(format!("({})°", u.ambient.name), &u.ambient.patch, u.ambient.rank);
    Ok(Subbundle { ambient, frame })
}
