//! Sieves, the Lawvere object Ω, subobject lattices and characteristic maps.
//!
//! Subobjects are literal, action-closed subsets of the ambient carriers, so
//! "the" characteristic map of a subobject is a structural equality rather
//! than an isomorphism class.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::bits::Bits;
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::fincat::{ArrowId, FinCat, ObjId};
use crate::presheaf::{coproduct, coproduct_of_maps, pullback, Presheaf, PresheafMap};

/// A set of arrows into `object`, closed under precomposition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    object: ObjId,
    arrows: Bits,
}

impl Sieve {
    pub fn maximal(cat: &FinCat, c: ObjId) -> Sieve {
        Sieve { object: c, arrows: Bits::from_indices(cat.arrow_count(), cat.arrows_into(c).iter().copied()) }
    }

    pub fn empty(cat: &FinCat, c: ObjId) -> Sieve {
        Sieve { object: c, arrows: Bits::new(cat.arrow_count()) }
    }

    /// The smallest sieve on `c` containing `generators`.
    pub fn generated(cat: &FinCat, c: ObjId, generators: &[ArrowId]) -> Result<Sieve> {
        let mut arrows = Bits::new(cat.arrow_count());
        for &g in generators {
            if cat.target(g) != c {
                return Err(Error::WrongSieveObject(cat.object_name(c).to_string()));
            }
            for &h in cat.arrows_into(cat.source(g)) {
                arrows.insert(cat.after(g, h));
            }
        }
        Ok(Sieve { object: c, arrows })
    }

    /// Validates an explicit arrow set.
    pub fn from_arrows(cat: &FinCat, c: ObjId, arrows: &[ArrowId]) -> Result<Sieve> {
        let s = Sieve::generated(cat, c, arrows)?;
        if s.arrows.count() != arrows.iter().collect::<BTreeSet<_>>().len() {
            return Err(Error::NotActionClosed(format!(
                "arrow set on {} is not closed under precomposition",
                cat.object_name(c)
            )));
        }
        Ok(s)
    }

    pub fn object(&self) -> ObjId {
        self.object
    }

    pub fn contains(&self, f: ArrowId) -> bool {
        self.arrows.contains(f)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrows.iter()
    }

    pub fn len(&self) -> usize {
        self.arrows.count()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_maximal(&self, cat: &FinCat) -> bool {
        self.arrows.contains(cat.identity(self.object))
    }

    /// `f*S = { g | f . g ∈ S }` for `f: d -> c`.
    pub fn pullback(&self, cat: &FinCat, f: ArrowId) -> Sieve {
        debug_assert_eq!(cat.target(f), self.object);
        let d = cat.source(f);
        let arrows = Bits::from_indices(
            cat.arrow_count(),
            cat.arrows_into(d).iter().copied().filter(|&g| self.arrows.contains(cat.after(f, g))),
        );
        Sieve { object: d, arrows }
    }

    pub fn intersection(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.object, other.object);
        Sieve { object: self.object, arrows: self.arrows.intersection(&other.arrows) }
    }

    pub fn union(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.object, other.object);
        Sieve { object: self.object, arrows: self.arrows.union(&other.arrows) }
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.object == other.object && self.arrows.is_subset(&other.arrows)
    }

    /// The arrows of the sieve not obtained as `g . h` with `g` in the
    /// sieve and `h` a non-identity: a minimal generating set.
    pub fn generators(&self, cat: &FinCat) -> Vec<ArrowId> {
        let mut gens: Vec<ArrowId> = Vec::new();
        let mut covered = Bits::new(cat.arrow_count());
        // Arrows sorted by how many arrows they generate, largest first.
        let mut arrows: Vec<ArrowId> = self.arrows().collect();
        let size = |g: ArrowId| cat.arrows_into(cat.source(g)).len();
        arrows.sort_by_key(|&g| (std::cmp::Reverse(size(g)), g));
        for g in arrows {
            if !covered.contains(g) {
                gens.push(g);
                for &h in cat.arrows_into(cat.source(g)) {
                    covered.insert(cat.after(g, h));
                }
            }
        }
        gens.sort();
        gens
    }

    pub fn describe(&self, cat: &FinCat) -> String {
        let names: Vec<&str> = self.arrows().map(|f| cat.arrow_name(f)).collect();
        format!("{}:{{{}}}", cat.object_name(self.object), names.join(","))
    }
}

impl fmt::Debug for Sieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sieve({}, {:?})", self.object, self.arrows)
    }
}

/// Every sieve on `c`, sorted.
pub fn all_sieves(cat: &FinCat, c: ObjId, caps: &SizeCaps) -> Result<Vec<Sieve>> {
    // Every sieve is reachable from the empty one by adding principal sieves.
    let principal: Vec<Sieve> = cat.arrows_into(c).iter().map(|&g| Sieve::generated(cat, c, &[g]).unwrap()).collect();
    let mut seen: BTreeSet<Sieve> = BTreeSet::new();
    let mut queue = VecDeque::from([Sieve::empty(cat, c)]);
    seen.insert(Sieve::empty(cat, c));
    while let Some(s) = queue.pop_front() {
        for p in &principal {
            let t = s.union(p);
            if !seen.contains(&t) {
                seen.insert(t.clone());
                caps.check_enumeration("sieve count", seen.len() as u128)?;
                queue.push_back(t);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// The Lawvere object: `Ω(c)` is the set of sieves on `c`, acting by
/// pullback, with `t: 1 -> Ω` picking the maximal sieves.
#[derive(Debug)]
pub struct Omega {
    base: Arc<FinCat>,
    sieves: Vec<Vec<Sieve>>,
    index: Vec<HashMap<Sieve, usize>>,
    maximal: Vec<usize>,
    presheaf: Presheaf,
    truth: PresheafMap,
}

impl Omega {
    pub fn new(base: Arc<FinCat>) -> Result<Arc<Omega>> {
        Omega::with_caps(base, &SizeCaps::current())
    }

    pub fn with_caps(base: Arc<FinCat>, caps: &SizeCaps) -> Result<Arc<Omega>> {
        let sieves: Vec<Vec<Sieve>> = base.objects().map(|c| all_sieves(&base, c, caps)).collect::<Result<_>>()?;
        let index: Vec<HashMap<Sieve, usize>> =
            sieves.iter().map(|ss| ss.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let maximal = base.objects().map(|c| index[c][&Sieve::maximal(&base, c)]).collect::<Vec<_>>();
        let names = sieves.iter().map(|ss| ss.iter().map(|s| s.describe(&base)).collect()).collect();
        let action = base
            .arrow_ids()
            .map(|f| sieves[base.target(f)].iter().map(|s| index[base.source(f)][&s.pullback(&base, f)]).collect())
            .collect();
        let presheaf = Presheaf::new_unchecked(base.clone(), names, action);
        let one = Presheaf::constant(base.clone(), 1);
        let truth = PresheafMap::new_unchecked(one, presheaf.clone(), maximal.iter().map(|&m| vec![m]).collect());
        Ok(Arc::new(Omega { base, sieves, index, maximal, presheaf, truth }))
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    /// The universal monomorphism `t: 1 -> Ω`.
    pub fn truth(&self) -> &PresheafMap {
        &self.truth
    }

    pub fn sieves(&self, c: ObjId) -> &[Sieve] {
        &self.sieves[c]
    }

    pub fn sieve(&self, c: ObjId, i: usize) -> &Sieve {
        &self.sieves[c][i]
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.sieves[c].len()
    }

    pub fn index_of(&self, s: &Sieve) -> usize {
        self.index[s.object][s]
    }

    pub fn maximal(&self, c: ObjId) -> usize {
        self.maximal[c]
    }

    /// Index of `f*S` for `f: d -> c` and `S` the sieve with index `i` on `c`.
    #[inline]
    pub fn pull(&self, f: ArrowId, i: usize) -> usize {
        self.presheaf.act(f, i)
    }

    /// Inclusion order on `Ω(c)` by index.
    pub fn leq(&self, c: ObjId, i: usize, j: usize) -> bool {
        self.sieves[c][i].is_subset(&self.sieves[c][j])
    }

    pub fn meet(&self, c: ObjId, i: usize, j: usize) -> usize {
        self.index[c][&self.sieves[c][i].intersection(&self.sieves[c][j])]
    }

    /// The subobject of `C(-, c)` corresponding to a sieve on `c`.
    pub fn sieve_subobject(&self, s: &Sieve) -> Subobject {
        let c = s.object;
        let yc = Presheaf::yoneda(self.base.clone(), c).unwrap();
        let selected = self
            .base
            .objects()
            .map(|d| {
                let hom = self.base.hom(d, c).unwrap();
                Bits::from_indices(hom.len(), hom.iter().enumerate().filter(|(_, &g)| s.contains(g)).map(|(k, _)| k))
            })
            .collect();
        Subobject { ambient: yc, selected }
    }

    /// The sieve corresponding to a subobject of `C(-, c)`.
    pub fn subobject_sieve(&self, c: ObjId, s: &Subobject) -> Sieve {
        let mut arrows = Bits::new(self.base.arrow_count());
        for d in self.base.objects() {
            for (k, g) in self.base.hom(d, c).unwrap().into_iter().enumerate() {
                if s.contains(d, k) {
                    arrows.insert(g);
                }
            }
        }
        Sieve { object: c, arrows }
    }

    /// The mono `S -> C(-, c)` of a sieve, as a map of presheaves.
    pub fn sieve_mono(&self, s: &Sieve) -> PresheafMap {
        self.sieve_subobject(s).inclusion()
    }
}

/// A literal subpresheaf: an action-closed choice of elements at each object.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subobject {
    ambient: Presheaf,
    selected: Vec<Bits>,
}

impl PartialOrd for Presheaf {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Presheaf {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sizes().cmp(&other.sizes()).then_with(|| {
            let cat = self.base();
            cat.arrow_ids().map(|f| self.action_table(f)).cmp(other.base().arrow_ids().map(|f| other.action_table(f)))
        })
    }
}

impl Subobject {
    pub fn new(ambient: Presheaf, selected: Vec<Vec<bool>>) -> Result<Subobject> {
        let cat = ambient.base().clone();
        if selected.len() != cat.object_count() || cat.objects().any(|c| selected[c].len() != ambient.size(c)) {
            return Err(Error::NotActionClosed("selection has the wrong shape".into()));
        }
        let selected: Vec<Bits> = selected
            .iter()
            .map(|v| Bits::from_indices(v.len(), v.iter().enumerate().filter(|p| *p.1).map(|p| p.0)))
            .collect();
        let s = Subobject { ambient, selected };
        for f in cat.arrow_ids() {
            for x in s.selected[cat.target(f)].iter() {
                if !s.selected[cat.source(f)].contains(s.ambient.act(f, x)) {
                    return Err(Error::NotActionClosed(format!(
                        "element {} is moved out of the selection by {}",
                        s.ambient.element_name(cat.target(f), x),
                        cat.arrow_name(f)
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn whole(ambient: &Presheaf) -> Subobject {
        let selected = ambient.sizes().into_iter().map(Bits::full).collect();
        Subobject { ambient: ambient.clone(), selected }
    }

    pub fn empty(ambient: &Presheaf) -> Subobject {
        let selected = ambient.sizes().into_iter().map(Bits::new).collect();
        Subobject { ambient: ambient.clone(), selected }
    }

    /// The smallest subobject containing the given `(object, element)` pairs.
    pub fn generated(ambient: &Presheaf, elements: &[(ObjId, usize)]) -> Subobject {
        let cat = ambient.base();
        let mut s = Subobject::empty(ambient);
        for &(c, x) in elements {
            for &f in cat.arrows_into(c) {
                s.selected[cat.source(f)].insert(ambient.act(f, x));
            }
        }
        s
    }

    /// The image of a map as a subobject of its target.
    pub fn image_of(m: &PresheafMap) -> Subobject {
        let mut s = Subobject::empty(m.target());
        for c in m.base().objects() {
            for &y in m.component(c) {
                s.selected[c].insert(y);
            }
        }
        s
    }

    pub fn ambient(&self) -> &Presheaf {
        &self.ambient
    }

    pub fn contains(&self, c: ObjId, x: usize) -> bool {
        self.selected[c].contains(x)
    }

    pub fn elements(&self, c: ObjId) -> impl Iterator<Item = usize> + '_ {
        self.selected[c].iter()
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.selected[c].count()
    }

    pub fn is_whole(&self) -> bool {
        self.selected.iter().all(|b| b.count() == b.len())
    }

    pub fn leq(&self, other: &Subobject) -> bool {
        self.selected.iter().zip(&other.selected).all(|(a, b)| a.is_subset(b))
    }

    pub fn meet(&self, other: &Subobject) -> Subobject {
        let selected = self.selected.iter().zip(&other.selected).map(|(a, b)| a.intersection(b)).collect();
        Subobject { ambient: self.ambient.clone(), selected }
    }

    pub fn join(&self, other: &Subobject) -> Subobject {
        let selected = self.selected.iter().zip(&other.selected).map(|(a, b)| a.union(b)).collect();
        Subobject { ambient: self.ambient.clone(), selected }
    }

    /// The subobject as a presheaf, elements in ambient order.
    pub fn to_presheaf(&self) -> Presheaf {
        self.inclusion().source().clone()
    }

    /// The inclusion of the subobject into its ambient presheaf.
    pub fn inclusion(&self) -> PresheafMap {
        let cat = self.ambient.base().clone();
        let members: Vec<Vec<usize>> = self.selected.iter().map(|b| b.iter().collect()).collect();
        let names = members
            .iter()
            .enumerate()
            .map(|(c, xs)| xs.iter().map(|&x| self.ambient.element_name(c, x).to_string()).collect())
            .collect();
        let action = cat
            .arrow_ids()
            .map(|f| {
                let a = cat.source(f);
                members[cat.target(f)]
                    .iter()
                    .map(|&x| members[a].binary_search(&self.ambient.act(f, x)).unwrap())
                    .collect()
            })
            .collect();
        let sub = Presheaf::new_unchecked(cat, names, action);
        PresheafMap::new_unchecked(sub, self.ambient.clone(), members)
    }

    /// Pulls the subobject back along `f: X -> A`.
    pub fn preimage(&self, f: &PresheafMap) -> Subobject {
        let cat = f.base();
        let selected = cat
            .objects()
            .map(|c| {
                Bits::from_indices(
                    f.source().size(c),
                    (0..f.source().size(c)).filter(|&x| self.contains(c, f.apply(c, x))),
                )
            })
            .collect();
        Subobject { ambient: f.source().clone(), selected }
    }
}

impl fmt::Debug for Subobject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.selected).finish()
    }
}

/// All subobjects of a presheaf with the inclusion order.
#[derive(Debug, Clone)]
pub struct SubobjectLattice {
    elements: Vec<Subobject>,
    index: HashMap<Subobject, usize>,
}

impl SubobjectLattice {
    pub fn elements(&self) -> &[Subobject] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, s: &Subobject) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.elements[i].leq(&self.elements[j])
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].meet(&self.elements[j])]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].join(&self.elements[j])]
    }
}

pub fn subobjects(a: &Presheaf) -> Result<SubobjectLattice> {
    subobjects_with(a, &SizeCaps::current())
}

pub fn subobjects_with(a: &Presheaf, caps: &SizeCaps) -> Result<SubobjectLattice> {
    let cat = a.base();
    let principal: Vec<Subobject> = cat
        .objects()
        .flat_map(|c| (0..a.size(c)).map(move |x| (c, x)))
        .map(|e| Subobject::generated(a, &[e]))
        .collect();
    let mut seen: BTreeSet<Subobject> = BTreeSet::new();
    let empty = Subobject::empty(a);
    seen.insert(empty.clone());
    let mut queue = VecDeque::from([empty]);
    while let Some(s) = queue.pop_front() {
        for p in &principal {
            let t = s.join(p);
            if !seen.contains(&t) {
                seen.insert(t.clone());
                caps.check_enumeration("subobject count", seen.len() as u128)?;
                queue.push_back(t);
            }
        }
    }
    let elements: Vec<Subobject> = seen.into_iter().collect();
    let index = elements.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok(SubobjectLattice { elements, index })
}

/// The characteristic map `χ: A -> Ω` of a subobject `S ⊆ A`:
/// `χ(x) = { f: d -> c | A(f)(x) ∈ S(d) }`.
pub fn classify(omega: &Omega, s: &Subobject) -> PresheafMap {
    let cat = omega.base();
    let a = s.ambient();
    let components = cat
        .objects()
        .map(|c| {
            (0..a.size(c))
                .map(|x| {
                    let arrows = Bits::from_indices(
                        cat.arrow_count(),
                        cat.arrows_into(c).iter().copied().filter(|&f| s.contains(cat.source(f), a.act(f, x))),
                    );
                    omega.index_of(&Sieve { object: c, arrows })
                })
                .collect()
        })
        .collect();
    PresheafMap::new_unchecked(a.clone(), omega.presheaf().clone(), components)
}

/// The characteristic map of the image of a map (a mono is classified by
/// its canonical subobject).
pub fn classify_map(omega: &Omega, m: &PresheafMap) -> PresheafMap {
    classify(omega, &Subobject::image_of(m))
}

/// The subobject of `A` obtained by pulling `t: 1 -> Ω` back along `χ`,
/// computed as an actual pullback and normalized to its image.
pub fn pullback_of_truth(omega: &Omega, chi: &PresheafMap) -> Subobject {
    let pb = pullback(chi, omega.truth()).expect("χ lands in Ω");
    Subobject::image_of(pb.left())
}

/// Whether the mono `m` has a monic characteristic map.
pub fn is_univalent(omega: &Omega, m: &PresheafMap) -> Result<bool> {
    if !m.is_mono() {
        return Err(Error::NotAMono);
    }
    Ok(classify_map(omega, m).is_mono())
}

/// A univalent mono `v: T -> V` generating a local class, with `V` realized
/// as a canonical subobject of Ω.
#[derive(Debug, Clone)]
pub struct UnivalentGenerator {
    /// `v: T -> V`.
    pub mono: PresheafMap,
    /// The monic characteristic map `V -> Ω` of `v`.
    pub classifying: PresheafMap,
    /// The subobject of Ω that `V` is.
    pub code: Subobject,
    /// The coproduct `α` of the generating monos.
    pub coproduct: PresheafMap,
    /// The surjection from the codomain of `α` onto `V`.
    pub cover: PresheafMap,
}

/// Builds the univalent generator of the local class generated by `monos`:
/// take the coproduct `α` of the monos, factor its characteristic map as a
/// surjection onto its image `V ⊆ Ω` followed by the inclusion, and let
/// `T` be the pullback of `t` to `V`. Every generator is checked to be a
/// base change of the result.
pub fn univalent_generator(omega: &Omega, monos: &[PresheafMap]) -> Result<UnivalentGenerator> {
    if monos.iter().any(|m| !m.is_mono()) {
        return Err(Error::NotAMono);
    }
    let base = omega.base();
    let alpha = coproduct_of_maps(base, monos)?;
    let chi = classify_map(omega, &alpha);
    let code = Subobject::image_of(&chi);
    let classifying = code.inclusion();
    let v_obj = classifying.source().clone();
    // χ corestricted to V.
    let cover_components = base
        .objects()
        .map(|c| {
            let members: Vec<usize> = code.elements(c).collect();
            chi.component(c).iter().map(|y| members.binary_search(y).unwrap()).collect()
        })
        .collect();
    let cover = PresheafMap::new(alpha.target().clone(), v_obj.clone(), cover_components)?;
    let mono = pullback_of_truth(omega, &classifying).inclusion();

    let targets: Vec<Presheaf> = monos.iter().map(|m| m.target().clone()).collect();
    let injections = coproduct(base, &targets)?;
    for (i, m) in monos.iter().enumerate() {
        let to_v = injections.injection(i).then(&cover)?;
        let pulled = Subobject::image_of(&mono).preimage(&to_v);
        if pulled != Subobject::image_of(m) {
            return Err(Error::NotLocal(format!("generator #{i} is not a base change of the generator")));
        }
    }
    if !classify_map(omega, &mono).is_mono() {
        return Err(Error::NotLocal("generator is not univalent".into()));
    }
    Ok(UnivalentGenerator { mono, classifying, code, coproduct: alpha, cover })
}
