//! Finite categories given by explicit, total composition tables.
//!
//! Objects and arrows are sorted by name when a category is validated, so
//! every enumeration that walks objects or arrows in index order is
//! reproducible. Identity arrows are generated automatically and named
//! `id_<object>`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::caps::SizeCaps;
use crate::error::{Error, Result};

pub type ObjId = usize;
pub type ArrowId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowInfo {
    pub name: String,
    pub source: ObjId,
    pub target: ObjId,
}

/// Unvalidated category tables as they come out of a parser.
///
/// `arrows` lists the non-identity arrows as `(name, source, target)`;
/// `compose` lists equations `(g, f, h)` read as `g . f = h`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
    pub compose: Vec<(String, String, String)>,
}

impl RawCategory {
    pub fn new(objects: &[&str], arrows: &[(&str, &str, &str)], compose: &[(&str, &str, &str)]) -> Self {
        RawCategory {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            arrows: arrows.iter().map(|(n, s, t)| (n.to_string(), s.to_string(), t.to_string())).collect(),
            compose: compose.iter().map(|(g, f, h)| (g.to_string(), f.to_string(), h.to_string())).collect(),
        }
    }

    /// Completes the composition table by freely adding composites.
    ///
    /// Each declared equation `g . f = h` becomes a rewrite rule on paths of
    /// generators; arrows are the normal forms of all paths. Fails when the
    /// normal forms are not closed under concatenation or when more than
    /// `caps.arrows` arrows would be generated. The result still has to pass
    /// [`validate_category`], which catches non-associative outcomes.
    pub fn saturate(&self, caps: &SizeCaps) -> Result<RawCategory> {
        let mut gen_index: HashMap<&str, usize> = HashMap::new();
        for (i, (name, _, _)) in self.arrows.iter().enumerate() {
            if gen_index.insert(name.as_str(), i).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let is_identity = |name: &str| name.strip_prefix("id_").is_some_and(|o| self.objects.iter().any(|x| x == o));
        let generator = |name: &str| -> Result<usize> {
            gen_index.get(name).copied().ok_or_else(|| Error::UnknownArrow(name.to_string()))
        };

        // Paths are in diagrammatic order: [f, g] means "f then g".
        let mut rules: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (g, f, h) in &self.compose {
            if is_identity(f) || is_identity(g) {
                continue;
            }
            let key = (generator(f)?, generator(g)?);
            let rhs = if is_identity(h) { vec![] } else { vec![generator(h)?] };
            if let Some(prev) = rules.insert(key, rhs.clone()) {
                if prev != rhs {
                    return Err(Error::FreeCompositionFailed(format!("two different values declared for ({g} . {f})")));
                }
            }
        }
        let normalize = |mut path: Vec<usize>| -> Vec<usize> {
            'outer: loop {
                for i in 0..path.len().saturating_sub(1) {
                    if let Some(rhs) = rules.get(&(path[i], path[i + 1])) {
                        path.splice(i..i + 2, rhs.iter().copied());
                        continue 'outer;
                    }
                }
                return path;
            }
        };
        let src = |p: &[usize]| self.arrows[p[0]].1.clone();
        let tgt = |p: &[usize]| self.arrows[p[p.len() - 1]].2.clone();

        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for i in 0..self.arrows.len() {
            let p = normalize(vec![i]);
            if !p.is_empty() && seen.insert(p.clone()) {
                queue.push_back(p);
            }
        }
        let limit = caps.arrows;
        while let Some(p) = queue.pop_front() {
            for (e, (_, s, _)) in self.arrows.iter().enumerate() {
                if *s != tgt(&p) {
                    continue;
                }
                let mut q = p.clone();
                q.push(e);
                let q = normalize(q);
                if !q.is_empty() && seen.insert(q.clone()) {
                    if seen.len() + self.objects.len() > limit {
                        return Err(Error::SizeCapExceeded {
                            what: "saturated arrow count",
                            count: (seen.len() + self.objects.len()) as u128,
                            cap: limit as u128,
                        });
                    }
                    queue.push_back(q);
                }
            }
        }

        let name_of = |p: &[usize]| -> String {
            p.iter().rev().map(|&i| self.arrows[i].0.as_str()).collect::<Vec<_>>().join(".")
        };
        let mut out = RawCategory { objects: self.objects.clone(), ..Default::default() };
        for p in &seen {
            out.arrows.push((name_of(p), src(p), tgt(p)));
        }
        for p in &seen {
            for q in &seen {
                if tgt(p) != src(q) {
                    continue;
                }
                let mut pq = p.clone();
                pq.extend_from_slice(q);
                let r = normalize(pq);
                let h = if r.is_empty() {
                    if src(p) != tgt(q) {
                        return Err(Error::FreeCompositionFailed(format!(
                            "({} . {}) is declared an identity between different objects",
                            name_of(q),
                            name_of(p)
                        )));
                    }
                    format!("id_{}", src(p))
                } else if seen.contains(&r) {
                    name_of(&r)
                } else {
                    return Err(Error::FreeCompositionFailed(format!(
                        "rewriting ({} . {}) leaves the generated arrows",
                        name_of(q),
                        name_of(p)
                    )));
                };
                out.compose.push((name_of(q), name_of(p), h));
            }
        }
        Ok(out)
    }
}

/// A finite category: objects, arrows, identities and a total composition
/// table on composable pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinCat {
    objects: Vec<String>,
    arrows: Vec<ArrowInfo>,
    identity: Vec<ArrowId>,
    /// `compose[f * n + g]` is `g . f` when `f` and `g` are composable.
    compose: Vec<Option<ArrowId>>,
    into: Vec<Vec<ArrowId>>,
    out_of: Vec<Vec<ArrowId>>,
}

/// Validates raw tables with the default caps.
pub fn validate_category(raw: &RawCategory) -> Result<FinCat> {
    validate_category_with(raw, &SizeCaps::current())
}

pub fn validate_category_with(raw: &RawCategory, caps: &SizeCaps) -> Result<FinCat> {
    let mut objects = raw.objects.clone();
    objects.sort();
    if let Some(w) = objects.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateName(w[0].clone()));
    }
    let obj_index: HashMap<&str, ObjId> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let obj = |name: &str| obj_index.get(name).copied().ok_or_else(|| Error::UnknownObject(name.to_string()));

    let mut arrows: Vec<ArrowInfo> = Vec::new();
    for (i, o) in objects.iter().enumerate() {
        arrows.push(ArrowInfo { name: format!("id_{o}"), source: i, target: i });
    }
    for (name, s, t) in &raw.arrows {
        arrows.push(ArrowInfo { name: name.clone(), source: obj(s)?, target: obj(t)? });
    }
    arrows.sort_by(|a, b| a.name.cmp(&b.name));
    if let Some(w) = arrows.windows(2).find(|w| w[0].name == w[1].name) {
        return Err(Error::DuplicateName(w[0].name.clone()));
    }
    let n = arrows.len();
    if n > caps.arrows {
        return Err(Error::SizeCapExceeded { what: "arrow count", count: n as u128, cap: caps.arrows as u128 });
    }
    let arrow_index: HashMap<&str, ArrowId> = arrows.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
    let arrow = |name: &str| arrow_index.get(name).copied().ok_or_else(|| Error::UnknownArrow(name.to_string()));

    let mut identity = vec![0; objects.len()];
    for (i, o) in objects.iter().enumerate() {
        identity[i] = arrow_index[format!("id_{o}").as_str()];
    }
    let is_id = |f: ArrowId| identity[arrows[f].source] == f;

    let mut compose: Vec<Option<ArrowId>> = vec![None; n * n];
    for f in 0..n {
        compose[f * n + identity[arrows[f].target]] = Some(f);
        compose[identity[arrows[f].source] * n + f] = Some(f);
    }
    let mut declared: BTreeMap<(ArrowId, ArrowId), ArrowId> = BTreeMap::new();
    for (g_name, f_name, h_name) in &raw.compose {
        let (f, g, h) = (arrow(f_name)?, arrow(g_name)?, arrow(h_name)?);
        let mismatch = |reason: &str| Error::CompositeTypeMismatch {
            f: f_name.clone(),
            g: g_name.clone(),
            h: h_name.clone(),
            reason: reason.to_string(),
        };
        if arrows[f].target != arrows[g].source {
            return Err(mismatch("arrows are not composable"));
        }
        if arrows[h].source != arrows[f].source || arrows[h].target != arrows[g].target {
            return Err(mismatch("result has the wrong source or target"));
        }
        if is_id(f) || is_id(g) {
            let expected = if is_id(f) { g } else { f };
            if h != expected {
                return Err(Error::IdentityViolation {
                    f: f_name.clone(),
                    g: g_name.clone(),
                    expected: arrows[expected].name.clone(),
                });
            }
            continue;
        }
        if let Some(prev) = declared.insert((f, g), h) {
            if prev != h {
                return Err(Error::ConflictingComposite {
                    f: f_name.clone(),
                    g: g_name.clone(),
                    first: arrows[prev].name.clone(),
                    second: h_name.clone(),
                });
            }
        }
        compose[f * n + g] = Some(h);
    }
    for f in 0..n {
        for g in 0..n {
            if arrows[f].target == arrows[g].source && compose[f * n + g].is_none() {
                return Err(Error::MissingComposite { f: arrows[f].name.clone(), g: arrows[g].name.clone() });
            }
        }
    }

    let mut into = vec![Vec::new(); objects.len()];
    let mut out_of = vec![Vec::new(); objects.len()];
    for (i, a) in arrows.iter().enumerate() {
        into[a.target].push(i);
        out_of[a.source].push(i);
    }
    let cat = FinCat { objects, arrows, identity, compose, into, out_of };
    cat.check_associative()?;
    Ok(cat)
}

impl FinCat {
    /// Builds and validates a category from string tables; panics on invalid
    /// input. Intended for hard-coded sites and shapes.
    pub fn from_tables(objects: &[&str], arrows: &[(&str, &str, &str)], compose: &[(&str, &str, &str)]) -> FinCat {
        validate_category(&RawCategory::new(objects, arrows, compose)).expect("invalid built-in category")
    }

    fn check_associative(&self) -> Result<()> {
        for f in 0..self.arrows.len() {
            for g in self.out_of[self.arrows[f].target].iter().copied() {
                let fg = self.then(f, g);
                for h in self.out_of[self.arrows[g].target].iter().copied() {
                    if self.then(fg, h) != self.then(f, self.then(g, h)) {
                        return Err(Error::AssociativityViolation {
                            f: self.arrows[f].name.clone(),
                            g: self.arrows[g].name.clone(),
                            h: self.arrows[h].name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-runs every structural check.
    pub fn revalidate(&self) -> Result<()> {
        validate_category(&self.to_raw()).map(|_| ())
    }

    /// The raw tables of this category, listing every non-identity composite.
    pub fn to_raw(&self) -> RawCategory {
        let mut raw = RawCategory { objects: self.objects.clone(), ..Default::default() };
        for (i, a) in self.arrows.iter().enumerate() {
            if !self.is_identity(i) {
                raw.arrows.push((a.name.clone(), self.objects[a.source].clone(), self.objects[a.target].clone()));
            }
        }
        for f in self.non_identities() {
            for g in self.out_of[self.arrows[f].target].iter().copied() {
                if !self.is_identity(g) {
                    raw.compose.push((
                        self.arrows[g].name.clone(),
                        self.arrows[f].name.clone(),
                        self.arrows[self.then(f, g)].name.clone(),
                    ));
                }
            }
        }
        raw
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len()
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> {
        0..self.arrows.len()
    }

    pub fn non_identities(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(|&f| !self.is_identity(f))
    }

    pub fn object_name(&self, c: ObjId) -> &str {
        &self.objects[c]
    }

    pub fn object_id(&self, name: &str) -> Result<ObjId> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn arrow(&self, f: ArrowId) -> &ArrowInfo {
        &self.arrows[f]
    }

    pub fn arrow_name(&self, f: ArrowId) -> &str {
        &self.arrows[f].name
    }

    pub fn arrow_id(&self, name: &str) -> Result<ArrowId> {
        self.arrows.iter().position(|a| a.name == name).ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    pub fn source(&self, f: ArrowId) -> ObjId {
        self.arrows[f].source
    }

    pub fn target(&self, f: ArrowId) -> ObjId {
        self.arrows[f].target
    }

    pub fn identity(&self, c: ObjId) -> ArrowId {
        self.identity[c]
    }

    pub fn is_identity(&self, f: ArrowId) -> bool {
        self.identity[self.arrows[f].source] == f
    }

    /// `compose(f, g)` is "f then g", i.e. `g . f`; `None` when the target of
    /// `f` is not the source of `g`.
    pub fn compose(&self, f: ArrowId, g: ArrowId) -> Option<ArrowId> {
        self.compose[f * self.arrows.len() + g]
    }

    /// `g . f` for composable arrows.
    #[inline]
    pub fn after(&self, g: ArrowId, f: ArrowId) -> ArrowId {
        self.then(f, g)
    }

    #[inline]
    fn then(&self, f: ArrowId, g: ArrowId) -> ArrowId {
        self.compose[f * self.arrows.len() + g].expect("arrows are not composable")
    }

    /// Arrows with target `c`, in index order.
    pub fn arrows_into(&self, c: ObjId) -> &[ArrowId] {
        &self.into[c]
    }

    /// Arrows with source `c`, in index order.
    pub fn arrows_from(&self, c: ObjId) -> &[ArrowId] {
        &self.out_of[c]
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> Result<Vec<ArrowId>> {
        if a >= self.objects.len() {
            return Err(Error::UnknownObject(format!("#{a}")));
        }
        if b >= self.objects.len() {
            return Err(Error::UnknownObject(format!("#{b}")));
        }
        Ok(self.out_of[a].iter().copied().filter(|&f| self.arrows[f].target == b).collect())
    }

    pub fn hom_by_name(&self, a: &str, b: &str) -> Result<Vec<ArrowId>> {
        self.hom(self.object_id(a)?, self.object_id(b)?)
    }

    pub fn opposite(&self) -> FinCat {
        let n = self.arrows.len();
        let arrows: Vec<ArrowInfo> = self
            .arrows
            .iter()
            .map(|a| ArrowInfo { name: a.name.clone(), source: a.target, target: a.source })
            .collect();
        let mut compose = vec![None; n * n];
        for f in 0..n {
            for g in 0..n {
                compose[f * n + g] = self.compose[g * n + f];
            }
        }
        FinCat {
            objects: self.objects.clone(),
            arrows,
            identity: self.identity.clone(),
            compose,
            into: self.out_of.clone(),
            out_of: self.into.clone(),
        }
    }
}

/// A functor between finite categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinFunctor {
    domain: Arc<FinCat>,
    codomain: Arc<FinCat>,
    objects: Vec<ObjId>,
    arrows: Vec<ArrowId>,
}

impl FinFunctor {
    pub fn new(domain: Arc<FinCat>, codomain: Arc<FinCat>, objects: Vec<ObjId>, arrows: Vec<ArrowId>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidFunctor(m));
        if objects.len() != domain.object_count() || arrows.len() != domain.arrow_count() {
            return bad("tables have the wrong length".into());
        }
        if objects.iter().any(|&o| o >= codomain.object_count()) || arrows.iter().any(|&a| a >= codomain.arrow_count())
        {
            return bad("tables point outside the codomain".into());
        }
        for f in domain.arrow_ids() {
            let image = arrows[f];
            if codomain.source(image) != objects[domain.source(f)]
                || codomain.target(image) != objects[domain.target(f)]
            {
                return bad(format!("{} is sent to an arrow with the wrong endpoints", domain.arrow_name(f)));
            }
        }
        for c in domain.objects() {
            if arrows[domain.identity(c)] != codomain.identity(objects[c]) {
                return bad(format!("identity of {} is not preserved", domain.object_name(c)));
            }
        }
        for f in domain.arrow_ids() {
            for &g in domain.arrows_from(domain.target(f)) {
                if arrows[domain.after(g, f)] != codomain.after(arrows[g], arrows[f]) {
                    return bad(format!(
                        "composite {} . {} is not preserved",
                        domain.arrow_name(g),
                        domain.arrow_name(f)
                    ));
                }
            }
        }
        Ok(FinFunctor { domain, codomain, objects, arrows })
    }

    pub fn identity(cat: Arc<FinCat>) -> Self {
        let objects = cat.objects().collect();
        let arrows = cat.arrow_ids().collect();
        FinFunctor { domain: cat.clone(), codomain: cat, objects, arrows }
    }

    pub fn domain(&self) -> &Arc<FinCat> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinCat> {
        &self.codomain
    }

    pub fn on_object(&self, c: ObjId) -> ObjId {
        self.objects[c]
    }

    pub fn on_arrow(&self, f: ArrowId) -> ArrowId {
        self.arrows[f]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FinFunctor) -> Result<FinFunctor> {
        if *self.codomain != *next.domain {
            return Err(Error::InvalidFunctor("codomain and domain differ".into()));
        }
        FinFunctor::new(
            self.domain.clone(),
            next.codomain.clone(),
            self.objects.iter().map(|&o| next.objects[o]).collect(),
            self.arrows.iter().map(|&a| next.arrows[a]).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sites;
    use proptest::prelude::*;

    #[test]
    fn terminal_and_interval() {
        let t = FinCat::from_tables(&["*"], &[], &[]);
        assert_eq!(t.arrow_count(), 1);
        let i = FinCat::from_tables(&["a", "b"], &[("f", "a", "b")], &[]);
        assert_eq!(i.arrow_count(), 3);
        let (a, b) = (i.object_id("a").unwrap(), i.object_id("b").unwrap());
        assert_eq!(i.hom(a, b).unwrap(), vec![i.arrow_id("f").unwrap()]);
        assert!(i.hom(b, a).unwrap().is_empty());
        assert!(matches!(i.hom(0, 7), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn wrong_target_is_rejected() {
        let raw = RawCategory::new(
            &["a", "b", "c"],
            &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "b")],
            &[("g", "f", "h")],
        );
        assert!(matches!(validate_category(&raw), Err(Error::CompositeTypeMismatch { .. })));
    }

    #[test]
    fn missing_composite_is_rejected() {
        let raw = RawCategory::new(&["a", "b", "c"], &[("f", "a", "b"), ("g", "b", "c")], &[]);
        assert_eq!(validate_category(&raw), Err(Error::MissingComposite { f: "f".into(), g: "g".into() }));
    }

    #[test]
    fn identity_violation_is_rejected() {
        let raw = RawCategory::new(&["a", "b"], &[("f", "a", "b"), ("k", "a", "b")], &[("id_b", "f", "k")]);
        assert!(matches!(validate_category(&raw), Err(Error::IdentityViolation { .. })));
    }

    #[test]
    fn associativity_violation_is_rejected() {
        // (u . u) . u = e . u = e but u . (u . u) = u . e = u.
        let raw = RawCategory::new(
            &["*"],
            &[("e", "*", "*"), ("u", "*", "*")],
            &[("e", "e", "e"), ("e", "u", "e"), ("u", "e", "u"), ("u", "u", "e")],
        );
        assert!(matches!(validate_category(&raw), Err(Error::AssociativityViolation { .. })));
    }

    #[test]
    fn idempotent_monoid_is_self_dual() {
        let m = FinCat::from_tables(&["*"], &[("e", "*", "*")], &[("e", "e", "e")]);
        assert_eq!(m.opposite(), m);
        let t = FinCat::from_tables(&["*"], &[], &[]);
        assert_eq!(t.opposite(), t);
    }

    #[test]
    fn interval_opposite_reverses_the_arrow() {
        let i = sites::interval();
        let op = i.opposite();
        let f = op.arrow_id("f").unwrap();
        assert_eq!(op.object_name(op.source(f)), "b");
        assert_eq!(op.object_name(op.target(f)), "a");
        op.revalidate().unwrap();
    }

    #[test]
    fn monoid_hom_has_all_arrows() {
        let m = sites::monoid3();
        assert_eq!(m.hom(0, 0).unwrap().len(), 3);
    }

    #[test]
    fn free_composition_saturates_paths() {
        let raw = RawCategory::new(&["a", "b", "c"], &[("f", "a", "b"), ("g", "b", "c")], &[]);
        let cat = validate_category(&raw.saturate(&SizeCaps::default()).unwrap()).unwrap();
        assert_eq!(cat.arrow_count(), 6);
        assert!(cat.arrow_id("g.f").is_ok());

        // A free loop never closes up.
        let raw = RawCategory::new(&["*"], &[("s", "*", "*")], &[]);
        let caps = SizeCaps { arrows: 16, ..SizeCaps::default() };
        assert!(matches!(raw.saturate(&caps), Err(Error::SizeCapExceeded { .. })));

        // A loop with s.s.s = s via the declared s.s = t, t.s = s.
        let raw = RawCategory::new(
            &["*"],
            &[("s", "*", "*"), ("t", "*", "*")],
            &[("s", "s", "t"), ("s", "t", "s"), ("t", "s", "s"), ("t", "t", "t")],
        );
        let cat = validate_category(&raw.saturate(&SizeCaps::default()).unwrap()).unwrap();
        assert_eq!(cat.arrow_count(), 3);
    }

    #[test]
    fn functors_are_checked() {
        let i = Arc::new(sites::interval());
        let t = Arc::new(sites::terminal());
        let collapse = FinFunctor::new(i.clone(), t.clone(), vec![0, 0], vec![0, 0, 0]).unwrap();
        let id = FinFunctor::identity(i.clone());
        assert_eq!(id.then(&collapse).unwrap(), collapse);
        let f = i.arrow_id("f").unwrap();
        // Sending everything to id_a breaks endpoints of f.
        let a = i.object_id("a").unwrap();
        let mut arrows = vec![0; 3];
        arrows[f] = i.identity(a);
        arrows[i.identity(a)] = i.identity(a);
        arrows[i.identity(i.object_id("b").unwrap())] = i.identity(a);
        assert!(FinFunctor::new(i.clone(), i.clone(), vec![a, 1 - a], arrows).is_err());
    }

    fn all_sites() -> Vec<FinCat> {
        sites::test_sites().into_iter().map(|(_, c)| (*c).clone()).collect()
    }

    #[test]
    fn site_invariants() {
        for cat in all_sites() {
            cat.revalidate().unwrap();
            assert_eq!(validate_category(&cat.to_raw()).unwrap(), cat);
            assert_eq!(cat.opposite().opposite(), cat);
            let total: usize = cat
                .objects()
                .flat_map(|a| cat.objects().map(move |b| (a, b)))
                .map(|(a, b)| cat.hom(a, b).unwrap().len())
                .sum();
            assert_eq!(total, cat.arrow_count());
        }
    }

    /// The strict order generated by `bits` on four points, as raw tables.
    fn poset_category(bits: &[bool]) -> RawCategory {
        let names = ["p", "q", "r", "s"];
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let mut le = [[false; 4]; 4];
        for (&(i, j), &b) in pairs.iter().zip(bits) {
            le[i][j] = b;
        }
        for m in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    le[i][j] |= le[i][m] && le[m][j];
                }
            }
        }
        let name = |i: usize, j: usize| format!("{}{}", names[i], names[j]);
        let related: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| le[i][j]).collect();
        let arrows = related.iter().map(|&(i, j)| (name(i, j), names[i].to_string(), names[j].to_string())).collect();
        let mut compose = Vec::new();
        for &(i, j) in &related {
            for &(j2, m) in &related {
                if j == j2 {
                    compose.push((name(j, m), name(i, j), name(i, m)));
                }
            }
        }
        RawCategory { objects: names.iter().map(|s| s.to_string()).collect(), arrows, compose }
    }

    proptest! {
        // Random posets on up to 4 objects: the order relation is the category.
        #[test]
        fn random_posets_validate(bits in proptest::collection::vec(any::<bool>(), 6)) {
            let raw = poset_category(&bits);
            let cat = validate_category(&raw).unwrap();
            prop_assert_eq!(cat.opposite().opposite(), cat.clone());
            prop_assert!(cat.revalidate().is_ok());
        }
    }
}
