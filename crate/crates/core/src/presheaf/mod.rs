//! Finite-set-valued presheaves on a [`FinCat`] and the maps between them.
//!
//! Carriers are `0..n` at each object, with display names kept alongside.
//! Equality and hashing ignore the names, so two presheaves are equal
//! exactly when their carriers and action tables coincide.

mod hom;
mod limits;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{ArrowId, FinCat, ObjId};

pub use hom::{count_maps, maps_between, maps_between_with};
pub use limits::{
    base_change, colimit, coproduct, coproduct_of_maps, initial, limit, product, pullback, terminal, Colimit, Diagram,
    Limit, Pullback,
};

struct PresheafData {
    base: Arc<FinCat>,
    names: Vec<Vec<String>>,
    /// `action[f]` sends an element of the carrier at the target of `f` to
    /// one at its source.
    action: Vec<Vec<usize>>,
}

#[derive(Clone)]
pub struct Presheaf(Arc<PresheafData>);

fn default_names(sizes: &[usize]) -> Vec<Vec<String>> {
    sizes.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect()
}

impl Presheaf {
    /// Builds a presheaf and checks functoriality exhaustively.
    pub fn new(base: Arc<FinCat>, names: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Result<Presheaf> {
        let p = Presheaf(Arc::new(PresheafData { base, names, action }));
        p.check()?;
        Ok(p)
    }

    pub fn from_sizes(base: Arc<FinCat>, sizes: &[usize], action: Vec<Vec<usize>>) -> Result<Presheaf> {
        Presheaf::new(base, default_names(sizes), action)
    }

    /// Builds a presheaf from an action function, checking functoriality.
    pub fn from_fn(
        base: Arc<FinCat>,
        names: Vec<Vec<String>>,
        act: impl Fn(ArrowId, usize) -> usize,
    ) -> Result<Presheaf> {
        let action = base.arrow_ids().map(|f| (0..names[base.target(f)].len()).map(|x| act(f, x)).collect()).collect();
        Presheaf::new(base, names, action)
    }

    /// Construction path for values functorial by construction.
    pub(crate) fn new_unchecked(base: Arc<FinCat>, names: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Presheaf {
        let p = Presheaf(Arc::new(PresheafData { base, names, action }));
        debug_assert!(p.check().is_ok(), "{:?}", p.check());
        p
    }

    fn check(&self) -> Result<()> {
        let d = &*self.0;
        let cat = &d.base;
        let bad = |m: String| Err(Error::NotFunctorial(m));
        if d.names.len() != cat.object_count() || d.action.len() != cat.arrow_count() {
            return bad("tables have the wrong length".into());
        }
        for f in cat.arrow_ids() {
            let (s, t) = (cat.source(f), cat.target(f));
            if d.action[f].len() != d.names[t].len() {
                return bad(format!("action of {} has the wrong domain size", cat.arrow_name(f)));
            }
            if d.action[f].iter().any(|&y| y >= d.names[s].len()) {
                return bad(format!("action of {} leaves the carrier", cat.arrow_name(f)));
            }
        }
        for c in cat.objects() {
            let id = &d.action[cat.identity(c)];
            if id.iter().enumerate().any(|(i, &y)| i != y) {
                return bad(format!("identity at {} does not act trivially", cat.object_name(c)));
            }
        }
        // f: a -> b, g: b -> c; X(g . f) = X(f) . X(g).
        for f in cat.arrow_ids() {
            for &g in cat.arrows_from(cat.target(f)) {
                let gf = cat.after(g, f);
                for x in 0..d.names[cat.target(g)].len() {
                    if d.action[gf][x] != d.action[f][d.action[g][x]] {
                        return bad(format!(
                            "action of {} . {} differs from the composite action",
                            cat.arrow_name(g),
                            cat.arrow_name(f)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.0.base
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.0.names[c].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.0.names.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.0.names.iter().map(Vec::len).sum()
    }

    pub fn names(&self, c: ObjId) -> &[String] {
        &self.0.names[c]
    }

    pub fn element_name(&self, c: ObjId, x: usize) -> &str {
        &self.0.names[c][x]
    }

    pub fn element_id(&self, c: ObjId, name: &str) -> Option<usize> {
        self.0.names[c].iter().position(|n| n == name)
    }

    /// The action of `f: a -> b`, sending `x` in `X(b)` to `X(f)(x)` in `X(a)`.
    #[inline]
    pub fn act(&self, f: ArrowId, x: usize) -> usize {
        self.0.action[f][x]
    }

    pub fn action_table(&self, f: ArrowId) -> &[usize] {
        &self.0.action[f]
    }

    /// Same carriers and action, new element names.
    pub fn renamed(&self, names: Vec<Vec<String>>) -> Presheaf {
        assert!(names.iter().map(Vec::len).eq(self.sizes()));
        Presheaf(Arc::new(PresheafData { base: self.0.base.clone(), names, action: self.0.action.clone() }))
    }

    pub fn same_base(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(self.base(), other.base()) || self.base() == other.base()
    }

    /// The representable presheaf `C(-, c)`, carriers ordered by arrow index.
    pub fn yoneda(base: Arc<FinCat>, c: ObjId) -> Result<Presheaf> {
        if c >= base.object_count() {
            return Err(Error::UnknownObject(format!("#{c}")));
        }
        let homs: Vec<Vec<ArrowId>> = base.objects().map(|b| base.hom(b, c).unwrap()).collect();
        let names = homs.iter().map(|h| h.iter().map(|&g| base.arrow_name(g).to_string()).collect()).collect();
        let action = base
            .arrow_ids()
            .map(|f| {
                let s = base.source(f);
                homs[base.target(f)]
                    .iter()
                    .map(|&g| {
                        let gf = base.after(g, f);
                        homs[s].iter().position(|&h| h == gf).unwrap()
                    })
                    .collect()
            })
            .collect();
        Ok(Presheaf::new_unchecked(base, names, action))
    }

    /// `n` disjoint copies of the terminal presheaf.
    pub fn constant(base: Arc<FinCat>, n: usize) -> Presheaf {
        let names = base.objects().map(|_| (0..n).map(|i| i.to_string()).collect()).collect();
        let action = base.arrow_ids().map(|_| (0..n).collect()).collect();
        Presheaf::new_unchecked(base, names, action)
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.same_base(other)
                && self.0.action == other.0.action
                && self.0.names.iter().map(Vec::len).eq(other.0.names.iter().map(Vec::len)))
    }
}

impl Eq for Presheaf {}

impl Hash for Presheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sizes().hash(state);
        self.0.action.hash(state);
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cat = self.base();
        let mut m = f.debug_map();
        for c in cat.objects() {
            m.entry(&cat.object_name(c), &self.0.names[c]);
        }
        m.finish()
    }
}

/// A natural transformation between presheaves on the same base.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PresheafMap {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMap {
    /// Builds a map and checks every naturality square.
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<PresheafMap> {
        let m = PresheafMap { source, target, components };
        m.check()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> PresheafMap {
        let m = PresheafMap { source, target, components };
        debug_assert!(m.check().is_ok(), "{:?}", m.check());
        m
    }

    fn check(&self) -> Result<()> {
        if !self.source.same_base(&self.target) {
            return Err(Error::BaseMismatch);
        }
        let cat = self.source.base().clone();
        let bad = |m: String| Err(Error::NotNatural(m));
        if self.components.len() != cat.object_count() {
            return bad("wrong number of components".into());
        }
        for c in cat.objects() {
            let comp = &self.components[c];
            if comp.len() != self.source.size(c) || comp.iter().any(|&y| y >= self.target.size(c)) {
                return bad(format!("component at {} is not a function", cat.object_name(c)));
            }
        }
        for f in cat.arrow_ids() {
            let (a, b) = (cat.source(f), cat.target(f));
            for x in 0..self.source.size(b) {
                if self.components[a][self.source.act(f, x)] != self.target.act(f, self.components[b][x]) {
                    return bad(format!("square for {} does not commute", cat.arrow_name(f)));
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: &Presheaf) -> PresheafMap {
        let components = p.sizes().into_iter().map(|n| (0..n).collect()).collect();
        PresheafMap { source: p.clone(), target: p.clone(), components }
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(p: &Presheaf) -> PresheafMap {
        let one = Presheaf::constant(p.base().clone(), 1);
        let components = p.sizes().into_iter().map(|n| vec![0; n]).collect();
        PresheafMap { source: p.clone(), target: one, components }
    }

    /// The unique map out of the empty presheaf.
    pub fn from_initial(p: &Presheaf) -> PresheafMap {
        let zero = Presheaf::constant(p.base().clone(), 0);
        let components = p.base().objects().map(|_| Vec::new()).collect();
        PresheafMap { source: zero, target: p.clone(), components }
    }

    /// The map `C(-, a) -> C(-, b)` given by postcomposition with `f: a -> b`.
    pub fn yoneda_arrow(base: Arc<FinCat>, f: ArrowId) -> Result<PresheafMap> {
        let ya = Presheaf::yoneda(base.clone(), base.source(f))?;
        let yb = Presheaf::yoneda(base.clone(), base.target(f))?;
        let components = base
            .objects()
            .map(|d| {
                let from = base.hom(d, base.source(f)).unwrap();
                let to = base.hom(d, base.target(f)).unwrap();
                from.iter().map(|&g| to.iter().position(|&h| h == base.after(f, g)).unwrap()).collect()
            })
            .collect();
        Ok(PresheafMap::new_unchecked(ya, yb, components))
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn base(&self) -> &Arc<FinCat> {
        self.source.base()
    }

    #[inline]
    pub fn apply(&self, c: ObjId, x: usize) -> usize {
        self.components[c][x]
    }

    pub fn component(&self, c: ObjId) -> &[usize] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// `next . self`.
    pub fn then(&self, next: &PresheafMap) -> Result<PresheafMap> {
        if self.target != next.source {
            return Err(Error::ShapeMismatch("target of the first map is not the source of the second".into()));
        }
        let components =
            self.components.iter().zip(&next.components).map(|(a, b)| a.iter().map(|&x| b[x]).collect()).collect();
        Ok(PresheafMap { source: self.source.clone(), target: next.target.clone(), components })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().zip(self.target.sizes()).all(|(comp, n)| {
            let mut seen = vec![false; n];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_surjection(&self) -> bool {
        self.components.iter().zip(self.target.sizes()).all(|(comp, n)| {
            let mut seen = vec![false; n];
            for &y in comp {
                seen[y] = true;
            }
            seen.into_iter().all(|b| b)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.source.sizes() == self.target.sizes() && self.is_mono()
    }

    pub fn inverse(&self) -> Option<PresheafMap> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut inv = vec![0; comp.len()];
                for (x, &y) in comp.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(PresheafMap { source: self.target.clone(), target: self.source.clone(), components })
    }

    /// Same components, reinterpreted between structurally equal presheaves
    /// (used to swap in better element names).
    pub fn retyped(&self, source: &Presheaf, target: &Presheaf) -> PresheafMap {
        assert!(*source == self.source && *target == self.target);
        PresheafMap { source: source.clone(), target: target.clone(), components: self.components.clone() }
    }
}

impl fmt::Debug for PresheafMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PresheafMap")
            .field("source", &self.source.sizes())
            .field("target", &self.target.sizes())
            .field("components", &self.components)
            .finish()
    }
}

/// The factorization `u = im . coim` through the pointwise set-image.
#[derive(Debug, Clone)]
pub struct ImageFactorization {
    pub coim: PresheafMap,
    pub im: PresheafMap,
}

impl ImageFactorization {
    pub fn image(&self) -> &Presheaf {
        self.im.source()
    }
}

/// Image elements at each object are listed in order of first preimage.
pub fn image_factorization(u: &PresheafMap) -> ImageFactorization {
    let cat = u.base().clone();
    let mut images: Vec<Vec<usize>> = Vec::with_capacity(cat.object_count());
    let mut coim = Vec::with_capacity(cat.object_count());
    for c in cat.objects() {
        let mut pos = vec![usize::MAX; u.target.size(c)];
        let mut img = Vec::new();
        let comp = u.component(c).iter().map(|&y| {
            if pos[y] == usize::MAX {
                pos[y] = img.len();
                img.push(y);
            }
            pos[y]
        });
        coim.push(comp.collect());
        images.push(img);
    }
    let names = images
        .iter()
        .enumerate()
        .map(|(c, img)| img.iter().map(|&y| u.target.element_name(c, y).to_string()).collect())
        .collect();
    let action = cat
        .arrow_ids()
        .map(|f| {
            let (a, b) = (cat.source(f), cat.target(f));
            images[b]
                .iter()
                .map(|&y| {
                    let z = u.target.act(f, y);
                    images[a].iter().position(|&w| w == z).expect("image is closed under the action")
                })
                .collect()
        })
        .collect();
    let mid = Presheaf::new_unchecked(cat, names, action);
    ImageFactorization {
        coim: PresheafMap::new_unchecked(u.source.clone(), mid.clone(), coim),
        im: PresheafMap::new_unchecked(mid, u.target.clone(), images),
    }
}

/// The diagonal `A -> A x_B A` of `u: A -> B`, into the computed pullback.
pub fn diagonal(u: &PresheafMap) -> PresheafMap {
    let pb = pullback(u, u).expect("a map has a pullback along itself");
    let id = PresheafMap::identity(u.source());
    pb.lift(&id, &id).expect("identity pairs form a cone")
}

/// `n`-fold iterated diagonal; `iterated_diagonal(u, 0)` is `u` itself.
pub fn iterated_diagonal(u: &PresheafMap, n: usize) -> PresheafMap {
    let mut d = u.clone();
    for _ in 0..n {
        d = diagonal(&d);
    }
    d
}

/// Connectivity index `n` in `{-1, 0, 1, ..., ∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connectivity {
    Finite(i64),
    Infinite,
}

/// Height from which the diagonal tower of any map of presheaves of sets
/// consists of monomorphisms.
pub const TOWER_MONO_HEIGHT: usize = 2;

/// `u` is n-connected when `Δ^k(u)` is surjective for `0 <= k <= n + 1`.
///
/// For `n = ∞` the tower is walked up to [`TOWER_MONO_HEIGHT`], where it
/// becomes mono; the mono condition is asserted, not assumed.
pub fn is_n_connected(u: &PresheafMap, n: Connectivity) -> bool {
    assert!(!matches!(n, Connectivity::Finite(k) if k < -1), "connectivity below -1");
    let top = match n {
        Connectivity::Finite(k) => (k + 1) as usize,
        Connectivity::Infinite => TOWER_MONO_HEIGHT,
    };
    let mut d = u.clone();
    for k in 0..=top {
        if !d.is_surjection() {
            return false;
        }
        if k == TOWER_MONO_HEIGHT {
            // From here on every level is a surjective mono, hence iso.
            assert!(d.is_mono(), "diagonal tower failed to stabilize");
            return true;
        }
        d = diagonal(&d);
    }
    true
}

/// Surjectivity via the nerve: `u: A -> B` is surjective iff the colimit of
/// its 2-truncated Čech nerve maps isomorphically onto `B`.
pub fn is_surjection_via_nerve(u: &PresheafMap) -> bool {
    use crate::sites::shapes;
    let x1 = pullback(u, u).expect("pullback of a map along itself");
    let (d1, d0) = (x1.left().clone(), x1.right().clone());
    // Triples (x, y, z) as pairs ((x, y), (y', z)) with y = y'.
    let x2 = pullback(&d0, &d1).expect("pullback of the face maps");
    let e2 = x2.left().clone();
    let e0 = x2.right().clone();
    let first = e2.then(&d1).unwrap();
    let last = e0.then(&d0).unwrap();
    let e1 = x1.lift(&first, &last).expect("outer vertices form a cone");
    let shape = Arc::new(shapes::nerve2());
    let a = |n: &str| shape.arrow_id(n).unwrap();
    let obj = |n: &str| shape.object_id(n).unwrap();
    let mut objects = vec![u.source().clone(); 3];
    objects[obj("x1")] = x1.apex().clone();
    objects[obj("x2")] = x2.apex().clone();
    let mut arrows: Vec<Option<PresheafMap>> = vec![None; shape.arrow_count()];
    for c in shape.objects() {
        arrows[shape.identity(c)] = Some(PresheafMap::identity(&objects[c]));
    }
    arrows[a("d0")] = Some(d0.clone());
    arrows[a("d1")] = Some(d1.clone());
    arrows[a("e0")] = Some(e0.clone());
    arrows[a("e1")] = Some(e1.clone());
    arrows[a("e2")] = Some(e2.clone());
    arrows[a("v0")] = Some(first);
    arrows[a("v1")] = Some(e0.then(&d1).unwrap());
    arrows[a("v2")] = Some(last);
    let diagram =
        Diagram::new(u.base().clone(), shape.clone(), objects, arrows.into_iter().map(Option::unwrap).collect())
            .expect("Čech nerve is a functor");
    let colim = colimit(&diagram).expect("nerve colimit");
    let mut legs = vec![u.clone(); 3];
    legs[obj("x1")] = diagram.arrow_map(a("d1")).then(u).unwrap();
    legs[obj("x2")] = diagram.arrow_map(a("v0")).then(u).unwrap();
    let to_base = colim.desc(&legs).expect("nerve cocone over the base");
    to_base.is_iso()
}
