//! Grothendieck topologies, Lawvere–Tierney closure operators and covering
//! classes.
//!
//! A topology is stored on the site, as a set of covering sieves per object
//! (a bitset over the indices of `Ω(c)`). A mono of presheaves belongs to
//! the topos-level class iff every value of its characteristic map covers.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::bits::Bits;
use crate::caps::SizeCaps;
use crate::classifier::{classify, classify_map, univalent_generator, Omega, Sieve, Subobject};
use crate::error::{Error, Result};
use crate::fincat::{FinCat, ObjId};
use crate::presheaf::PresheafMap;

/// An assignment of covering sieves satisfying maximality, stability and
/// transitivity.
#[derive(Clone)]
pub struct GrothTopology {
    omega: Arc<Omega>,
    covers: Vec<Bits>,
}

impl PartialEq for GrothTopology {
    fn eq(&self, other: &Self) -> bool {
        self.covers == other.covers && self.omega.base() == other.omega.base()
    }
}

impl Eq for GrothTopology {}

impl Hash for GrothTopology {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.covers.hash(state);
    }
}

/// Orders topologies by their covering bit-vectors, object by object.
impl Ord for GrothTopology {
    fn cmp(&self, other: &Self) -> Ordering {
        self.covers.cmp(&other.covers)
    }
}

impl PartialOrd for GrothTopology {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for GrothTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cat = self.base();
        let mut m = f.debug_map();
        for c in cat.objects() {
            let sieves: Vec<String> = self.covers(c).map(|s| s.describe(cat)).collect();
            m.entry(&cat.object_name(c), &sieves);
        }
        m.finish()
    }
}

impl GrothTopology {
    /// Validates an explicit sieve assignment.
    pub fn check_axioms(omega: &Arc<Omega>, covers: &[Vec<Sieve>]) -> Result<GrothTopology> {
        let cat = omega.base();
        if covers.len() != cat.object_count() {
            return Err(Error::ShapeMismatch("one sieve set per object is required".into()));
        }
        let mut bits: Vec<Bits> = cat.objects().map(|c| Bits::new(omega.size(c))).collect();
        for (c, sieves) in covers.iter().enumerate() {
            for s in sieves {
                if s.object() != c {
                    return Err(Error::WrongSieveObject(cat.object_name(c).to_string()));
                }
                bits[c].insert(omega.index_of(s));
            }
        }
        let g = GrothTopology { omega: omega.clone(), covers: bits };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let om = &self.omega;
        let cat = om.base();
        for c in cat.objects() {
            if !self.covers[c].contains(om.maximal(c)) {
                return Err(Error::MissingMaximal(cat.object_name(c).to_string()));
            }
        }
        for f in cat.arrow_ids() {
            for s in self.covers[cat.target(f)].iter() {
                if !self.covers[cat.source(f)].contains(om.pull(f, s)) {
                    return Err(Error::StabilityViolation {
                        sieve: om.sieve(cat.target(f), s).describe(cat),
                        arrow: cat.arrow_name(f).to_string(),
                    });
                }
            }
        }
        for c in cat.objects() {
            for s in self.covers[c].iter() {
                for r in 0..om.size(c) {
                    if !self.covers[c].contains(r) && self.locally_covers(c, s, r) {
                        return Err(Error::TransitivityViolation {
                            covering: om.sieve(c, s).describe(cat),
                            sieve: om.sieve(c, r).describe(cat),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `f*R` covers for every `f` in the sieve `S` (both by index).
    fn locally_covers(&self, c: ObjId, s: usize, r: usize) -> bool {
        let om = &self.omega;
        om.sieve(c, s).arrows().all(|f| self.covers[om.base().source(f)].contains(om.pull(f, r)))
    }

    /// Only the maximal sieves cover.
    pub fn minimal(omega: &Arc<Omega>) -> GrothTopology {
        let covers = omega.base().objects().map(|c| Bits::from_indices(omega.size(c), [omega.maximal(c)])).collect();
        GrothTopology { omega: omega.clone(), covers }
    }

    /// Every sieve covers.
    pub fn maximal(omega: &Arc<Omega>) -> GrothTopology {
        let covers = omega.base().objects().map(|c| Bits::full(omega.size(c))).collect();
        GrothTopology { omega: omega.clone(), covers }
    }

    /// The least topology in which every given sieve covers.
    pub fn generate(omega: &Arc<Omega>, sieves: &[Sieve]) -> GrothTopology {
        let mut g = GrothTopology::minimal(omega);
        for s in sieves {
            g.covers[s.object()].insert(omega.index_of(s));
        }
        g.saturate();
        g
    }

    /// The least topology containing the given monos: each mono contributes
    /// the values of its characteristic map, i.e. its pullbacks along every
    /// element of its codomain.
    pub fn generate_from_monos(omega: &Arc<Omega>, monos: &[PresheafMap]) -> Result<GrothTopology> {
        let mut g = GrothTopology::minimal(omega);
        for m in monos {
            if !m.is_mono() {
                return Err(Error::NotAMono);
            }
            g.add_classified(m);
        }
        g.saturate();
        Ok(g)
    }

    fn add_classified(&mut self, m: &PresheafMap) {
        let chi = classify_map(&self.omega, m);
        for c in self.omega.base().objects() {
            for &s in chi.component(c) {
                self.covers[c].insert(s);
            }
        }
    }

    /// Closes the covering sets under stability and transitivity.
    fn saturate(&mut self) {
        let om = self.omega.clone();
        let cat = om.base();
        loop {
            let mut changed = false;
            for f in cat.arrow_ids() {
                let (d, c) = (cat.source(f), cat.target(f));
                let pulled: Vec<usize> = self.covers[c].iter().map(|s| om.pull(f, s)).collect();
                for t in pulled {
                    changed |= self.covers[d].insert(t);
                }
            }
            for c in cat.objects() {
                let covering: Vec<usize> = self.covers[c].iter().collect();
                for r in 0..om.size(c) {
                    if !self.covers[c].contains(r) && covering.iter().any(|&s| self.locally_covers(c, s, r)) {
                        self.covers[c].insert(r);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn omega(&self) -> &Arc<Omega> {
        &self.omega
    }

    pub fn base(&self) -> &Arc<FinCat> {
        self.omega.base()
    }

    pub fn covers(&self, c: ObjId) -> impl Iterator<Item = &Sieve> + '_ {
        self.covers[c].iter().map(move |i| self.omega.sieve(c, i))
    }

    pub fn cover_count(&self) -> usize {
        self.covers.iter().map(Bits::count).sum()
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covers[s.object()].contains(self.omega.index_of(s))
    }

    /// Membership by index into `Ω(c)`.
    #[inline]
    pub fn covers_index(&self, c: ObjId, i: usize) -> bool {
        self.covers[c].contains(i)
    }

    pub fn covering_bits(&self) -> &[Bits] {
        &self.covers
    }

    /// Topos-level membership: a mono is in the class iff all of its
    /// representable pullbacks are covering sieves.
    pub fn contains_mono(&self, m: &PresheafMap) -> Result<bool> {
        if !m.is_mono() {
            return Err(Error::NotAMono);
        }
        Ok(self.classified_covers(m))
    }

    fn classified_covers(&self, m: &PresheafMap) -> bool {
        let chi = classify_map(&self.omega, m);
        self.omega.base().objects().all(|c| chi.component(c).iter().all(|&s| self.covers[c].contains(s)))
    }

    /// The subobject of Ω made of the covering sieves.
    pub fn dense_subobject(&self) -> Subobject {
        let omega = self.omega.presheaf();
        let selected = self
            .omega
            .base()
            .objects()
            .map(|c| (0..omega.size(c)).map(|i| self.covers[c].contains(i)).collect())
            .collect();
        Subobject::new(omega.clone(), selected).expect("covering sieves are stable")
    }

    pub fn leq(&self, other: &GrothTopology) -> bool {
        self.covers.iter().zip(&other.covers).all(|(a, b)| a.is_subset(b))
    }

    pub fn meet(&self, other: &GrothTopology) -> GrothTopology {
        let covers = self.covers.iter().zip(&other.covers).map(|(a, b)| a.intersection(b)).collect();
        let g = GrothTopology { omega: self.omega.clone(), covers };
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn join(&self, other: &GrothTopology) -> GrothTopology {
        let covers = self.covers.iter().zip(&other.covers).map(|(a, b)| a.union(b)).collect();
        let mut g = GrothTopology { omega: self.omega.clone(), covers };
        g.saturate();
        g
    }

    /// Join of any family; the minimal topology for an empty family.
    pub fn join_all<'a>(omega: &Arc<Omega>, family: impl IntoIterator<Item = &'a GrothTopology>) -> GrothTopology {
        family.into_iter().fold(GrothTopology::minimal(omega), |acc, g| acc.join(g))
    }

    /// Meet of any family; the maximal topology for an empty family.
    pub fn meet_all<'a>(omega: &Arc<Omega>, family: impl IntoIterator<Item = &'a GrothTopology>) -> GrothTopology {
        family.into_iter().fold(GrothTopology::maximal(omega), |acc, g| acc.meet(g))
    }

    pub fn covering_class(&self) -> CoveringClass {
        CoveringClass { topology: self.clone() }
    }

    pub fn to_lt(&self) -> Result<LtTopology> {
        groth_to_lt(self)
    }

    /// The closure operator of the topology, by the direct formula.
    pub fn closure_operator(&self) -> LtTopology {
        LtTopology { omega: self.omega.clone(), j: closure_formula(self) }
    }

    /// For each object, the least covering sieve (the intersection of all
    /// covering sieves, which covers since a finite site has finite meets
    /// of covers).
    pub fn least_cover(&self, c: ObjId) -> usize {
        let mut it = self.covers[c].iter();
        let first = it.next().expect("maximal sieve covers");
        it.fold(first, |acc, s| self.omega.meet(c, acc, s))
    }
}

/// A natural closure operator on Ω.
#[derive(Clone)]
pub struct LtTopology {
    omega: Arc<Omega>,
    j: PresheafMap,
}

impl PartialEq for LtTopology {
    fn eq(&self, other: &Self) -> bool {
        self.j == other.j
    }
}

impl Eq for LtTopology {}

impl fmt::Debug for LtTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("LtTopology").field(&self.j.components()).finish()
    }
}

impl LtTopology {
    /// Validates an endomorphism of Ω as a closure operator.
    pub fn new(omega: &Arc<Omega>, j: PresheafMap) -> Result<LtTopology> {
        if j.source() != omega.presheaf() || j.target() != omega.presheaf() {
            return Err(Error::NotAClosureOperator("not an endomorphism of Ω".into()));
        }
        let j = PresheafMap::new(j.source().clone(), j.target().clone(), j.components().to_vec())
            .map_err(|e| Error::NotAClosureOperator(e.to_string()))?;
        let cat = omega.base();
        for c in cat.objects() {
            let jc = j.component(c);
            for s in 0..omega.size(c) {
                let name = || omega.sieve(c, s).describe(cat);
                if !omega.leq(c, s, jc[s]) {
                    return Err(Error::NotAClosureOperator(format!("not inflating at {}", name())));
                }
                if jc[jc[s]] != jc[s] {
                    return Err(Error::NotAClosureOperator(format!("not idempotent at {}", name())));
                }
                for t in 0..omega.size(c) {
                    if omega.leq(c, s, t) && !omega.leq(c, jc[s], jc[t]) {
                        return Err(Error::NotAClosureOperator(format!("not monotone at {}", name())));
                    }
                }
            }
        }
        Ok(LtTopology { omega: omega.clone(), j })
    }

    pub fn identity(omega: &Arc<Omega>) -> LtTopology {
        LtTopology { omega: omega.clone(), j: PresheafMap::identity(omega.presheaf()) }
    }

    /// The operator sending every sieve to the maximal one.
    pub fn constant_maximal(omega: &Arc<Omega>) -> LtTopology {
        let components = omega.base().objects().map(|c| vec![omega.maximal(c); omega.size(c)]).collect();
        let j = PresheafMap::new_unchecked(omega.presheaf().clone(), omega.presheaf().clone(), components);
        LtTopology { omega: omega.clone(), j }
    }

    pub fn map(&self) -> &PresheafMap {
        &self.j
    }

    pub fn omega(&self) -> &Arc<Omega> {
        &self.omega
    }

    #[inline]
    pub fn apply(&self, c: ObjId, s: usize) -> usize {
        self.j.apply(c, s)
    }

    /// Pointwise order of closure operators.
    pub fn leq(&self, other: &LtTopology) -> bool {
        self.omega
            .base()
            .objects()
            .all(|c| (0..self.omega.size(c)).all(|s| self.omega.leq(c, self.apply(c, s), other.apply(c, s))))
    }

    pub fn to_groth(&self) -> GrothTopology {
        lt_to_groth(self)
    }
}

/// The dense sieves of `j`: those whose closure is maximal.
pub fn lt_to_groth(j: &LtTopology) -> GrothTopology {
    let om = &j.omega;
    let covers = om
        .base()
        .objects()
        .map(|c| Bits::from_indices(om.size(c), (0..om.size(c)).filter(|&s| j.apply(c, s) == om.maximal(c))))
        .collect();
    let g = GrothTopology { omega: om.clone(), covers };
    debug_assert!(g.validate().is_ok());
    g
}

/// The closure operator of `G`, as the characteristic map of the image of
/// the univalent generator of the class of covering sieve inclusions.
pub fn groth_to_lt(g: &GrothTopology) -> Result<LtTopology> {
    let om = g.omega();
    let monos: Vec<PresheafMap> =
        om.base().objects().flat_map(|c| g.covers(c).map(|s| om.sieve_mono(s)).collect::<Vec<_>>()).collect();
    let generator = univalent_generator(om, &monos)?;
    let j = classify(om, &generator.code);
    LtTopology::new(om, j)
}

/// `j_c(S) = { f: d -> c | f*S covers }`, computed directly.
pub fn closure_formula(g: &GrothTopology) -> PresheafMap {
    let om = g.omega();
    let cat = om.base();
    let components = cat
        .objects()
        .map(|c| {
            (0..om.size(c))
                .map(|s| {
                    let arrows: Vec<_> = cat
                        .arrows_into(c)
                        .iter()
                        .copied()
                        .filter(|&f| g.covers_index(cat.source(f), om.pull(f, s)))
                        .collect();
                    om.index_of(&Sieve::from_arrows(cat, c, &arrows).expect("closure is a sieve"))
                })
                .collect()
        })
        .collect();
    PresheafMap::new_unchecked(om.presheaf().clone(), om.presheaf().clone(), components)
}

/// The maps whose image is a covering mono.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringClass {
    topology: GrothTopology,
}

impl CoveringClass {
    pub fn topology(&self) -> &GrothTopology {
        &self.topology
    }

    pub fn member(&self, f: &PresheafMap) -> bool {
        self.topology.classified_covers(f)
    }
}

/// Subsets of `0..n` that contain `required`, as bitsets, in increasing
/// numeric order of their masks.
fn subsets_containing(n: usize, required: usize) -> impl Iterator<Item = Bits> {
    let others: Vec<usize> = (0..n).filter(|&i| i != required).collect();
    (0u64..1 << others.len()).map(move |mask| {
        Bits::from_indices(
            n,
            std::iter::once(required)
                .chain(others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i)),
        )
    })
}

fn check_search_space(omega: &Omega, per_object: &[usize], caps: &SizeCaps) -> Result<()> {
    let _ = omega;
    let total = per_object.iter().try_fold(1u128, |acc, &n| acc.checked_mul(n as u128));
    match total {
        Some(t) => caps.check_enumeration("topology search space", t),
        None => caps.check_enumeration("topology search space", u128::MAX),
    }
}

pub fn enumerate_topologies(omega: &Arc<Omega>) -> Result<Vec<GrothTopology>> {
    enumerate_topologies_with(omega, &SizeCaps::current())
}

/// Every topology on the site, by filtering all assignments of upward
/// closed sieve sets containing the maximal sieve. Sorted.
pub fn enumerate_topologies_with(omega: &Arc<Omega>, caps: &SizeCaps) -> Result<Vec<GrothTopology>> {
    let cat = omega.base();
    for c in cat.objects() {
        if omega.size(c) > 62 {
            return Err(Error::SizeCapExceeded { what: "sieves on one object", count: omega.size(c) as u128, cap: 62 });
        }
    }
    let raw_space: Vec<usize> = cat.objects().map(|c| 1usize << (omega.size(c) - 1).min(62)).collect();
    check_search_space(omega, &raw_space, caps)?;
    let candidates: Vec<Vec<Bits>> = cat
        .objects()
        .map(|c| {
            subsets_containing(omega.size(c), omega.maximal(c))
                .filter(|set| set.iter().all(|s| (0..omega.size(c)).all(|t| !omega.leq(c, s, t) || set.contains(t))))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; candidates.len()];
    'outer: loop {
        let covers = choice.iter().enumerate().map(|(c, &k)| candidates[c][k].clone()).collect();
        let g = GrothTopology { omega: omega.clone(), covers };
        if g.validate().is_ok() {
            out.push(g);
        }
        for i in (0..choice.len()).rev() {
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    out.sort();
    Ok(out)
}

pub fn enumerate_closure_operators(omega: &Arc<Omega>) -> Result<Vec<LtTopology>> {
    enumerate_closure_operators_with(omega, &SizeCaps::current())
}

/// Every closure operator on Ω, built independently of sieve sets: each
/// object gets a closure operator on the poset `Ω(c)` (one per family of
/// sieves containing the top and closed under intersection), and the
/// per-object choices are combined by backtracking over naturality.
pub fn enumerate_closure_operators_with(omega: &Arc<Omega>, caps: &SizeCaps) -> Result<Vec<LtTopology>> {
    let cat = omega.base().clone();
    let raw_space: Vec<usize> = cat.objects().map(|c| 1usize << (omega.size(c) - 1).min(62)).collect();
    check_search_space(omega, &raw_space, caps)?;
    let mut per_object: Vec<Vec<Vec<usize>>> = Vec::new();
    for c in cat.objects() {
        let n = omega.size(c);
        let mut ops = Vec::new();
        for family in subsets_containing(n, omega.maximal(c)) {
            let closed = family.iter().all(|a| family.iter().all(|b| family.contains(omega.meet(c, a, b))));
            if !closed {
                continue;
            }
            let op: Vec<usize> = (0..n)
                .map(|s| {
                    let above: Vec<usize> = family.iter().filter(|&t| omega.leq(c, s, t)).collect();
                    above.iter().copied().fold(omega.maximal(c), |acc, t| omega.meet(c, acc, t))
                })
                .collect();
            ops.push(op);
        }
        per_object.push(ops);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    natural_choices(omega, &per_object, &mut chosen, &mut out);
    Ok(out
        .into_iter()
        .map(|components| LtTopology {
            omega: omega.clone(),
            j: PresheafMap::new_unchecked(omega.presheaf().clone(), omega.presheaf().clone(), components),
        })
        .collect())
}

fn natural_choices(omega: &Omega, ops: &[Vec<Vec<usize>>], chosen: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
    let cat = omega.base();
    let c = chosen.len();
    if c == ops.len() {
        out.push(chosen.iter().enumerate().map(|(c, &k)| ops[c][k].clone()).collect());
        return;
    }
    for k in 0..ops[c].len() {
        chosen.push(k);
        // j_d(f*S) = f*(j_c(S)) for every arrow between objects chosen so far.
        let natural = cat.arrow_ids().filter(|&f| cat.source(f) <= c && cat.target(f) <= c).all(|f| {
            let (d, e) = (cat.source(f), cat.target(f));
            let (jd, je) = (&ops[d][chosen[d]], &ops[e][chosen[e]]);
            (0..omega.size(e)).all(|s| jd[omega.pull(f, s)] == omega.pull(f, je[s]))
        });
        if natural {
            natural_choices(omega, ops, chosen, out);
        }
        chosen.pop();
    }
}
