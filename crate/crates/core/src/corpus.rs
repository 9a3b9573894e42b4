//! Small exhaustive test corpora over a site: a handful of presheaves, every
//! map between them, and the inclusion of every sieve.

use std::sync::Arc;

use crate::classifier::Omega;
use crate::error::Result;
use crate::fincat::FinCat;
use crate::presheaf::{maps_between, Presheaf, PresheafMap};

#[derive(Debug, Clone)]
pub struct Corpus {
    pub omega: Arc<Omega>,
    /// `∅`, `1`, `1 ⊔ 1` and every representable.
    pub presheaves: Vec<Presheaf>,
    /// Every map between two corpus presheaves.
    pub maps: Vec<PresheafMap>,
    /// The inclusion `S -> C(-, c)` of every sieve `S` on every `c`.
    pub monos: Vec<PresheafMap>,
}

impl Corpus {
    pub fn new(base: &Arc<FinCat>) -> Result<Corpus> {
        let omega = Omega::new(base.clone())?;
        let mut presheaves: Vec<Presheaf> = (0..3).map(|n| Presheaf::constant(base.clone(), n)).collect();
        for c in base.objects() {
            let y = Presheaf::yoneda(base.clone(), c)?;
            if !presheaves.contains(&y) {
                presheaves.push(y);
            }
        }
        let mut maps = Vec::new();
        for x in &presheaves {
            for y in &presheaves {
                maps.extend(maps_between(x, y)?);
            }
        }
        let monos = base
            .objects()
            .flat_map(|c| omega.sieves(c).iter().map(|s| omega.sieve_mono(s)).collect::<Vec<_>>())
            .collect();
        Ok(Corpus { omega, presheaves, maps, monos })
    }

    /// Pairs of corpus maps with a common codomain, each unordered pair once.
    pub fn cospans(&self) -> Vec<(PresheafMap, PresheafMap)> {
        let mut out = Vec::new();
        for (i, f) in self.maps.iter().enumerate() {
            for g in &self.maps[i..] {
                if f.target() == g.target() {
                    out.push((f.clone(), g.clone()));
                }
            }
        }
        out
    }
}
