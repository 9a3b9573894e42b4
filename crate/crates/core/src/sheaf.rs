//! The sheaf condition, the plus construction and sheafification.
//!
//! A matching family for a sieve `S` on `c` is a map of presheaves
//! `S -> X`, so it is stored as the component table of such a map, with
//! the elements of `S(d)` listed in hom-set order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::caps::SizeCaps;
use crate::classifier::Sieve;
use crate::error::{Error, Result};
use crate::fincat::{ArrowId, ObjId};
use crate::presheaf::{count_maps, maps_between_with, pullback, Presheaf, PresheafMap};
use crate::topology::GrothTopology;

type Family = Vec<Vec<usize>>;

/// A sieve viewed as a presheaf, with positions of its arrows.
struct SieveShape {
    presheaf: Presheaf,
    /// `arrows[d]`: the arrows of the sieve with domain `d`, in hom order.
    arrows: Vec<Vec<ArrowId>>,
    /// Position of an arrow in `arrows[source]`, if it belongs to the sieve.
    position: Vec<Option<usize>>,
}

impl SieveShape {
    fn new(g: &GrothTopology, s: &Sieve) -> SieveShape {
        let cat = g.base();
        let c = s.object();
        let mut position = vec![None; cat.arrow_count()];
        let arrows: Vec<Vec<ArrowId>> = cat
            .objects()
            .map(|d| cat.hom(d, c).unwrap().into_iter().filter(|&h| s.contains(h)).collect::<Vec<_>>())
            .collect();
        for list in &arrows {
            for (k, &h) in list.iter().enumerate() {
                position[h] = Some(k);
            }
        }
        let presheaf = g.omega().sieve_subobject(s).to_presheaf();
        SieveShape { presheaf, arrows, position }
    }
}

/// Shapes of every covering sieve of a topology.
struct Shapes {
    by_sieve: Vec<HashMap<usize, SieveShape>>,
}

impl Shapes {
    fn new(g: &GrothTopology) -> Shapes {
        let om = g.omega();
        let by_sieve = g
            .base()
            .objects()
            .map(|c| {
                (0..om.size(c))
                    .filter(|&s| g.covers_index(c, s))
                    .map(|s| (s, SieveShape::new(g, om.sieve(c, s))))
                    .collect()
            })
            .collect();
        Shapes { by_sieve }
    }

    fn get(&self, c: ObjId, s: usize) -> &SieveShape {
        &self.by_sieve[c][&s]
    }
}

/// The family `g ↦ X(g)(x)` on the sieve `s`.
fn restriction_family(x: &Presheaf, shape: &SieveShape, elem: usize) -> Family {
    shape.arrows.iter().map(|list| list.iter().map(|&g| x.act(g, elem)).collect()).collect()
}

/// Whether every covering sieve sees `X(c)` as exactly its matching families.
pub fn is_sheaf(x: &Presheaf, g: &GrothTopology) -> Result<bool> {
    let shapes = Shapes::new(g);
    is_sheaf_with(x, g, &shapes)
}

fn is_sheaf_with(x: &Presheaf, g: &GrothTopology, shapes: &Shapes) -> Result<bool> {
    if !Arc::ptr_eq(x.base(), g.base()) && x.base() != g.base() {
        return Err(Error::BaseMismatch);
    }
    let om = g.omega();
    for c in g.base().objects() {
        for s in (0..om.size(c)).filter(|&s| g.covers_index(c, s)) {
            let shape = shapes.get(c, s);
            if count_maps(&shape.presheaf, x)? != x.size(c) as u128 {
                return Ok(false);
            }
            let mut seen = std::collections::HashSet::new();
            for e in 0..x.size(c) {
                if !seen.insert(restriction_family(x, shape, e)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The plus construction together with the data needed to act on maps.
#[derive(Clone)]
pub struct Plus {
    presheaf: Presheaf,
    unit: PresheafMap,
    /// Least representative `(sieve index, family)` of each class.
    representatives: Vec<Vec<(usize, Family)>>,
    lookup: Vec<HashMap<(usize, Family), usize>>,
}

impl fmt::Debug for Plus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Plus").field("sizes", &self.presheaf.sizes()).finish()
    }
}

impl Plus {
    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn unit(&self) -> &PresheafMap {
        &self.unit
    }

    /// The least `(sieve, matching family)` representing an element.
    pub fn representative(&self, c: ObjId, i: usize) -> (usize, &Family) {
        let (s, fam) = &self.representatives[c][i];
        (*s, fam)
    }

    fn class_of(&self, c: ObjId, s: usize, fam: Family) -> usize {
        self.lookup[c][&(s, fam)]
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

pub fn plus(x: &Presheaf, g: &GrothTopology) -> Result<Plus> {
    plus_with(x, g, &Shapes::new(g), &SizeCaps::current())
}

fn plus_with(x: &Presheaf, g: &GrothTopology, shapes: &Shapes, caps: &SizeCaps) -> Result<Plus> {
    let om = g.omega();
    let cat = g.base().clone();
    let mut representatives = Vec::with_capacity(cat.object_count());
    let mut lookup = Vec::with_capacity(cat.object_count());
    let mut names = Vec::with_capacity(cat.object_count());
    for c in cat.objects() {
        // All (covering sieve, matching family) pairs, in increasing order.
        let mut pairs: Vec<(usize, Family)> = Vec::new();
        for s in (0..om.size(c)).filter(|&s| g.covers_index(c, s)) {
            for fam in maps_between_with(&shapes.get(c, s).presheaf, x, caps)? {
                pairs.push((s, fam.components().to_vec()));
            }
        }
        pairs.sort();
        // (S, x) ~ (T, y) iff the sieve where they agree covers.
        let mut parent: Vec<usize> = (0..pairs.len()).collect();
        for i in 0..pairs.len() {
            for k in i + 1..pairs.len() {
                if find(&mut parent, i) == find(&mut parent, k) {
                    continue;
                }
                let (s, t) = (&pairs[i], &pairs[k]);
                let (ss, ts) = (shapes.get(c, s.0), shapes.get(c, t.0));
                let agree: Vec<ArrowId> = cat
                    .arrows_into(c)
                    .iter()
                    .copied()
                    .filter(|&h| match (ss.position[h], ts.position[h]) {
                        (Some(p), Some(q)) => s.1[cat.source(h)][p] == t.1[cat.source(h)][q],
                        _ => false,
                    })
                    .collect();
                let sieve = Sieve::from_arrows(&cat, c, &agree).expect("agreement set is a sieve");
                if g.is_covering(&sieve) {
                    let (ri, rk) = (find(&mut parent, i), find(&mut parent, k));
                    parent[ri.max(rk)] = ri.min(rk);
                }
            }
        }
        let mut class_of_root: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<(usize, Family)> = Vec::new();
        let mut map: HashMap<(usize, Family), usize> = HashMap::new();
        for i in 0..pairs.len() {
            let r = find(&mut parent, i);
            let class = *class_of_root.entry(r).or_insert_with(|| {
                reps.push(pairs[r].clone());
                reps.len() - 1
            });
            map.insert(pairs[i].clone(), class);
        }
        caps.check_elements("plus construction carrier", reps.len())?;
        let max = om.maximal(c);
        let unit_names: HashMap<usize, &str> = (0..x.size(c))
            .rev()
            .map(|e| (map[&(max, restriction_family(x, shapes.get(c, max), e))], x.element_name(c, e)))
            .collect();
        names.push(
            reps.iter()
                .enumerate()
                .map(|(k, (s, fam))| match unit_names.get(&k) {
                    Some(n) => n.to_string(),
                    None => format!("<{}|{:?}>", om.sieve(c, *s).describe(&cat), fam),
                })
                .collect::<Vec<_>>(),
        );
        representatives.push(reps);
        lookup.push(map);
    }
    let mut action = Vec::with_capacity(cat.arrow_count());
    for f in cat.arrow_ids() {
        let (d, c) = (cat.source(f), cat.target(f));
        let row = representatives[c]
            .iter()
            .map(|(s, fam)| {
                let t = om.pull(f, *s);
                let (from, to) = (shapes.get(c, *s), shapes.get(d, t));
                let pulled: Family = to
                    .arrows
                    .iter()
                    .enumerate()
                    .map(|(e, list)| list.iter().map(|&h| fam[e][from.position[cat.after(f, h)].unwrap()]).collect())
                    .collect();
                lookup[d][&(t, pulled)]
            })
            .collect();
        action.push(row);
    }
    let presheaf = Presheaf::new_unchecked(cat.clone(), names, action);
    let unit_components = cat
        .objects()
        .map(|c| {
            let max = om.maximal(c);
            (0..x.size(c)).map(|e| lookup[c][&(max, restriction_family(x, shapes.get(c, max), e))]).collect()
        })
        .collect();
    let unit = PresheafMap::new_unchecked(x.clone(), presheaf.clone(), unit_components);
    Ok(Plus { presheaf, unit, representatives, lookup })
}

/// `f⁺[(S, x)] = [(S, f . x)]`.
fn plus_map(f: &PresheafMap, source: &Plus, target: &Plus) -> PresheafMap {
    let cat = f.base();
    let components = cat
        .objects()
        .map(|c| {
            source.representatives[c]
                .iter()
                .map(|(s, fam)| {
                    let pushed: Family =
                        fam.iter().enumerate().map(|(d, xs)| xs.iter().map(|&v| f.apply(d, v)).collect()).collect();
                    target.class_of(c, *s, pushed)
                })
                .collect()
        })
        .collect();
    PresheafMap::new_unchecked(source.presheaf.clone(), target.presheaf.clone(), components)
}

/// The result of sheafifying one presheaf.
#[derive(Debug, Clone)]
pub struct Sheafified {
    first: Plus,
    second: Plus,
    unit: PresheafMap,
}

impl Sheafified {
    pub fn sheaf(&self) -> &Presheaf {
        &self.second.presheaf
    }

    /// The unit `X -> L X`.
    pub fn unit(&self) -> &PresheafMap {
        &self.unit
    }

    /// The intermediate separated presheaf `X⁺`.
    pub fn separated(&self) -> &Plus {
        &self.first
    }

    pub fn second_plus(&self) -> &Plus {
        &self.second
    }
}

/// A topology bundled with its sheafification functor, caching results.
pub struct LocalizationHandle {
    topology: GrothTopology,
    shapes: Shapes,
    caps: SizeCaps,
    sheafified: RwLock<HashMap<Presheaf, Arc<Sheafified>>>,
    sheaves: RwLock<HashMap<Presheaf, bool>>,
}

impl fmt::Debug for LocalizationHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalizationHandle").field("topology", &self.topology).finish()
    }
}

impl Clone for LocalizationHandle {
    fn clone(&self) -> Self {
        LocalizationHandle::with_caps(self.topology.clone(), self.caps)
    }
}

impl LocalizationHandle {
    pub fn new(topology: GrothTopology) -> LocalizationHandle {
        LocalizationHandle::with_caps(topology, SizeCaps::current())
    }

    pub fn with_caps(topology: GrothTopology, caps: SizeCaps) -> LocalizationHandle {
        let shapes = Shapes::new(&topology);
        LocalizationHandle {
            topology,
            shapes,
            caps,
            sheafified: RwLock::new(HashMap::new()),
            sheaves: RwLock::new(HashMap::new()),
        }
    }

    pub fn topology(&self) -> &GrothTopology {
        &self.topology
    }

    pub fn is_sheaf(&self, x: &Presheaf) -> Result<bool> {
        if let Some(&b) = self.sheaves.read().unwrap().get(x) {
            return Ok(b);
        }
        let b = is_sheaf_with(x, &self.topology, &self.shapes)?;
        self.sheaves.write().unwrap().insert(x.clone(), b);
        Ok(b)
    }

    pub fn plus(&self, x: &Presheaf) -> Result<Plus> {
        plus_with(x, &self.topology, &self.shapes, &self.caps)
    }

    pub fn sheafify(&self, x: &Presheaf) -> Result<Arc<Sheafified>> {
        if let Some(s) = self.sheafified.read().unwrap().get(x) {
            return Ok(s.clone());
        }
        if !x.same_base(self.topology.omega().presheaf()) {
            return Err(Error::BaseMismatch);
        }
        let first = self.plus(x)?;
        let second = self.plus(&first.presheaf)?;
        let unit = first.unit.then(&second.unit)?;
        let out = Arc::new(Sheafified { first, second, unit });
        self.sheafified.write().unwrap().insert(x.clone(), out.clone());
        Ok(out)
    }

    /// `L f: L X -> L Y`.
    pub fn sheafify_map(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let (sx, sy) = (self.sheafify(f.source())?, self.sheafify(f.target())?);
        let once = plus_map(f, &sx.first, &sy.first);
        Ok(plus_map(&once, &sx.second, &sy.second))
    }

    /// Whether sheafification turns `f` into an isomorphism.
    pub fn inverts(&self, f: &PresheafMap) -> Result<bool> {
        Ok(self.sheafify_map(f)?.is_iso())
    }

    /// Compares `L(X ×_Z Y)` with `L X ×_{L Z} L Y` for each cospan.
    pub fn check_left_exact(&self, cospans: &[(PresheafMap, PresheafMap)]) -> Result<LeftExactReport> {
        let one = Presheaf::constant(self.topology.base().clone(), 1);
        let terminal_preserved = {
            let l1 = self.sheafify(&one)?;
            l1.sheaf().sizes().iter().all(|&n| n == 1)
        };
        let mut failures = Vec::new();
        for (i, (f, g)) in cospans.iter().enumerate() {
            let pb = pullback(f, g)?;
            let (lf, lg) = (self.sheafify_map(f)?, self.sheafify_map(g)?);
            let lpb = pullback(&lf, &lg)?;
            let comparison = lpb.lift(&self.sheafify_map(pb.left())?, &self.sheafify_map(pb.right())?)?;
            if !comparison.is_iso() {
                failures.push(i);
            }
        }
        Ok(LeftExactReport { terminal_preserved, checked: cospans.len(), failures })
    }
}

/// Outcome of a left-exactness check: indices of cospans whose pullback is
/// not preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftExactReport {
    pub terminal_preserved: bool,
    pub checked: usize,
    pub failures: Vec<usize>,
}

impl LeftExactReport {
    pub fn is_exact(&self) -> bool {
        self.terminal_preserved && self.failures.is_empty()
    }
}

/// Sheafification `X -> L X` as the double plus construction.
pub fn sheafify(x: &Presheaf, g: &GrothTopology) -> Result<(Presheaf, PresheafMap)> {
    let handle = LocalizationHandle::new(g.clone());
    let s = handle.sheafify(x)?;
    Ok((s.sheaf().clone(), s.unit().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Omega;
    use crate::presheaf::{diagonal, image_factorization, maps_between};
    use crate::sites;
    use crate::topology::enumerate_topologies;

    fn interval_dense() -> GrothTopology {
        let cat = Arc::new(sites::interval());
        let om = Omega::new(cat.clone()).unwrap();
        let b = cat.object_id("b").unwrap();
        GrothTopology::generate(&om, &[Sieve::from_arrows(&cat, b, &[cat.arrow_id("f").unwrap()]).unwrap()])
    }

    fn small_presheaves(cat: &Arc<crate::FinCat>) -> Vec<Presheaf> {
        let mut out = vec![
            Presheaf::constant(cat.clone(), 0),
            Presheaf::constant(cat.clone(), 1),
            Presheaf::constant(cat.clone(), 2),
        ];
        out.extend(cat.objects().map(|c| Presheaf::yoneda(cat.clone(), c).unwrap()));
        out
    }

    #[test]
    fn minimal_topology_sheaves() {
        for (_, cat) in sites::test_sites() {
            let om = Omega::new(cat.clone()).unwrap();
            let g = GrothTopology::minimal(&om);
            for x in small_presheaves(&cat) {
                assert!(is_sheaf(&x, &g).unwrap());
                assert!(plus(&x, &g).unwrap().unit().is_iso());
            }
        }
    }

    #[test]
    fn maximal_topology_on_terminal_site() {
        let cat = Arc::new(sites::terminal());
        let om = Omega::new(cat.clone()).unwrap();
        let g = GrothTopology::maximal(&om);
        let two = Presheaf::constant(cat.clone(), 2);
        assert!(!is_sheaf(&two, &g).unwrap());
        assert!(is_sheaf(&Presheaf::constant(cat.clone(), 1), &g).unwrap());
        assert!(!is_sheaf(&Presheaf::constant(cat.clone(), 0), &g).unwrap());
        assert_eq!(plus(&two, &g).unwrap().presheaf().sizes(), vec![1]);
        assert_eq!(sheafify(&Presheaf::constant(cat, 0), &g).unwrap().0.sizes(), vec![1]);
    }

    #[test]
    fn interval_sheaves_are_bijective_restrictions() {
        let g = interval_dense();
        let cat = g.base().clone();
        let f = cat.arrow_id("f").unwrap();
        let (a, b) = (cat.object_id("a").unwrap(), cat.object_id("b").unwrap());
        for x in all_interval_presheaves(&cat, 3) {
            let fa = x.action_table(f);
            let bijective = x.size(a) == x.size(b) && {
                let mut v = fa.to_vec();
                v.sort();
                v.dedup();
                v.len() == fa.len()
            };
            assert_eq!(is_sheaf(&x, &g).unwrap(), bijective);
            let (lx, unit) = sheafify(&x, &g).unwrap();
            assert!(is_sheaf(&lx, &g).unwrap());
            assert_eq!(lx.size(b), x.size(a));
            assert!(unit.component(a).len() == x.size(a));
        }
    }

    fn sizes(a: usize, b: usize, na: usize, nb: usize) -> Vec<usize> {
        let mut s = vec![0; 2];
        s[a] = na;
        s[b] = nb;
        s
    }

    /// Every presheaf on a -> b with carriers of size below `n`.
    fn all_interval_presheaves(cat: &Arc<crate::FinCat>, n: usize) -> Vec<Presheaf> {
        let (a, b) = (cat.object_id("a").unwrap(), cat.object_id("b").unwrap());
        let f = cat.arrow_id("f").unwrap();
        let mut out = Vec::new();
        for na in 0..n {
            for nb in 0..n {
                if na == 0 && nb > 0 {
                    continue;
                }
                let total = na.pow(nb as u32);
                for code in 0..total {
                    let table: Vec<usize> = (0..nb).map(|k| code / na.pow(k as u32) % na).collect();
                    let sz = sizes(a, b, na, nb);
                    let action = cat
                        .arrow_ids()
                        .map(|g| if g == f { table.clone() } else { (0..sz[cat.target(g)]).collect() })
                        .collect();
                    let x = Presheaf::from_sizes(cat.clone(), &sz, action).unwrap();
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn plus_matches_least_cover_oracle() {
        for (_, cat) in sites::test_sites() {
            let om = Omega::new(cat.clone()).unwrap();
            for g in enumerate_topologies(&om).unwrap() {
                for x in small_presheaves(&cat) {
                    let p = plus(&x, &g).unwrap();
                    for c in cat.objects() {
                        let least = om.sieve_subobject(om.sieve(c, g.least_cover(c))).to_presheaf();
                        assert_eq!(p.presheaf().size(c) as u128, count_maps(&least, &x).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn sheafification_is_a_reflection() {
        for (_, cat) in sites::test_sites() {
            let om = Omega::new(cat.clone()).unwrap();
            for g in enumerate_topologies(&om).unwrap() {
                let h = LocalizationHandle::new(g.clone());
                let xs = small_presheaves(&cat);
                let sheaves: Vec<Presheaf> = xs.iter().map(|x| h.sheafify(x).unwrap().sheaf().clone()).collect();
                for x in &xs {
                    let s = h.sheafify(x).unwrap();
                    assert!(h.is_sheaf(s.sheaf()).unwrap());
                    assert!(h.sheafify(s.sheaf()).unwrap().unit().is_iso());
                    for y in &sheaves {
                        let from_l = maps_between(s.sheaf(), y).unwrap();
                        let composed: std::collections::BTreeSet<Vec<Vec<usize>>> =
                            from_l.iter().map(|m| s.unit().then(m).unwrap().components().to_vec()).collect();
                        assert_eq!(composed.len(), from_l.len());
                        assert_eq!(composed.len() as u128, count_maps(x, y).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn inverts_matches_local_surjection_and_local_mono() {
        for (_, cat) in sites::test_sites() {
            let om = Omega::new(cat.clone()).unwrap();
            for g in enumerate_topologies(&om).unwrap() {
                let h = LocalizationHandle::new(g.clone());
                let cover = g.covering_class();
                let xs = small_presheaves(&cat);
                for x in &xs {
                    for y in &xs {
                        for f in maps_between(x, y).unwrap() {
                            let expected = cover.member(&f) && cover.member(&diagonal(&f));
                            assert_eq!(h.inverts(&f).unwrap(), expected);
                            let im = image_factorization(&f);
                            assert_eq!(expected, h.inverts(&im.im).unwrap() && h.inverts(&im.coim).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interval_dense_handle_inverts_yoneda_f() {
        let g = interval_dense();
        let h = LocalizationHandle::new(g.clone());
        let yf = PresheafMap::yoneda_arrow(g.base().clone(), g.base().arrow_id("f").unwrap()).unwrap();
        assert!(h.inverts(&yf).unwrap());
        let min = LocalizationHandle::new(GrothTopology::minimal(g.omega()));
        assert!(!min.inverts(&yf).unwrap());
    }
}
