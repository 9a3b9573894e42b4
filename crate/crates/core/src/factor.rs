//! Orthogonality by exhaustive filler search, the dense–closed factorization
//! of monos and the cover–closed factorization of arbitrary maps.

use std::collections::HashMap;

use crate::classifier::{classify, pullback_of_truth, Subobject};
use crate::error::{Error, Result};
use crate::presheaf::{base_change, maps_between, PresheafMap};
use crate::topology::{GrothTopology, LtTopology};

/// A commuting square `f . top = bottom . u`, with `u: A -> B` on the left
/// and `f: X -> Y` on the right.
#[derive(Debug, Clone)]
pub struct LiftingProblem {
    pub u: PresheafMap,
    pub f: PresheafMap,
    pub top: PresheafMap,
    pub bottom: PresheafMap,
}

impl LiftingProblem {
    pub fn new(u: PresheafMap, f: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> Result<LiftingProblem> {
        if top.then(&f)? != u.then(&bottom)? {
            return Err(Error::ShapeMismatch("lifting square does not commute".into()));
        }
        Ok(LiftingProblem { u, f, top, bottom })
    }

    /// Every diagonal `d: B -> X` with `d . u = top` and `f . d = bottom`.
    pub fn fillers(&self) -> Result<Vec<PresheafMap>> {
        let mut out = Vec::new();
        for d in maps_between(self.u.target(), self.f.source())? {
            if self.u.then(&d)? == self.top && d.then(&self.f)? == self.bottom {
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// A factorization `right . left` whose middle object is a canonical
/// subobject of the codomain, with `right` its inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub middle: Subobject,
}

impl Factorization {
    pub fn composite(&self) -> PresheafMap {
        self.left.then(&self.right).expect("factors compose")
    }
}

/// `j_A(S)`: the pullback of `t` along `j . χ_S`.
pub fn closure(j: &LtTopology, s: &Subobject) -> Subobject {
    let chi = classify(j.omega(), s);
    pullback_of_truth(j.omega(), &chi.then(j.map()).expect("χ lands in Ω"))
}

/// Whether the closure of the image of `m` is everything.
pub fn is_dense(j: &LtTopology, m: &PresheafMap) -> Result<bool> {
    if !m.is_mono() {
        return Err(Error::NotAMono);
    }
    Ok(closure(j, &Subobject::image_of(m)).is_whole())
}

/// Whether the image of `m` is its own closure.
pub fn is_closed(j: &LtTopology, m: &PresheafMap) -> Result<bool> {
    if !m.is_mono() {
        return Err(Error::NotAMono);
    }
    let s = Subobject::image_of(m);
    Ok(closure(j, &s) == s)
}

/// Corestricts `u` to a subobject of its target containing its image.
fn corestrict(u: &PresheafMap, middle: &Subobject) -> PresheafMap {
    let inclusion = middle.inclusion();
    let components = u
        .base()
        .objects()
        .map(|c| {
            u.component(c).iter().map(|y| inclusion.component(c).binary_search(y).expect("image inside")).collect()
        })
        .collect();
    PresheafMap::new_unchecked(u.source().clone(), inclusion.source().clone(), components)
}

/// `S -> j_A(S) -> A` for a mono `m: S -> A`.
pub fn dense_closed_factor(m: &PresheafMap, j: &LtTopology) -> Result<Factorization> {
    if !m.is_mono() {
        return Err(Error::NotAMono);
    }
    let middle = closure(j, &Subobject::image_of(m));
    let f = Factorization { left: corestrict(m, &middle), right: middle.inclusion(), middle };
    debug_assert!(is_dense(j, &f.left).unwrap() && is_closed(j, &f.right).unwrap());
    Ok(f)
}

/// `X -> cl(im f) -> Y`: a covering map followed by a closed mono.
pub fn cover_closed_factor(f: &PresheafMap, g: &GrothTopology) -> Factorization {
    let j = g.closure_operator();
    let middle = closure(&j, &Subobject::image_of(f));
    let out = Factorization { left: corestrict(f, &middle), right: middle.inclusion(), middle };
    assert!(g.covering_class().member(&out.left), "left factor is covering");
    assert!(is_closed(&j, &out.right).unwrap(), "right factor is closed");
    out
}

type Components = Vec<Vec<usize>>;

/// Whether every commuting square from `u` to `f` has exactly one filler.
pub fn check_orthogonal(u: &PresheafMap, f: &PresheafMap) -> Result<bool> {
    if !u.base().as_ref().eq(f.base()) {
        return Err(Error::BaseMismatch);
    }
    // Count diagonals by the square they fill.
    let mut fillers: HashMap<(Components, Components), usize> = HashMap::new();
    for d in maps_between(u.target(), f.source())? {
        let key = (u.then(&d)?.components().to_vec(), d.then(f)?.components().to_vec());
        *fillers.entry(key).or_default() += 1;
    }
    let mut bottoms: HashMap<Vec<Vec<usize>>, Vec<Vec<Vec<usize>>>> = HashMap::new();
    for bottom in maps_between(u.target(), f.target())? {
        bottoms.entry(u.then(&bottom)?.components().to_vec()).or_default().push(bottom.components().to_vec());
    }
    for top in maps_between(u.source(), f.source())? {
        let Some(matching) = bottoms.get(top.then(f)?.components()) else { continue };
        for bottom in matching {
            if fillers.get(&(top.components().to_vec(), bottom.clone())) != Some(&1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `u` and each of its base changes along maps in `universe`
/// (those landing in the codomain of `u`) are left orthogonal to `f`.
pub fn check_fiberwise_orthogonal(u: &PresheafMap, f: &PresheafMap, universe: &[PresheafMap]) -> Result<bool> {
    if !check_orthogonal(u, f)? {
        return Ok(false);
    }
    for g in universe.iter().filter(|g| g.target() == u.target()) {
        if !check_orthogonal(&base_change(u, g)?, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}
