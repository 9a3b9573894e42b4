//! Finite limits and colimits of presheaves, computed pointwise.
//!
//! Limit elements are compatible tuples listed in lexicographic order;
//! colimit elements are equivalence classes listed by their least
//! representative `(shape object, element)`.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Presheaf, PresheafMap};
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::fincat::{ArrowId, FinCat, ObjId};
use crate::sites::shapes;

/// A functor from a finite shape category into presheaves.
#[derive(Debug, Clone)]
pub struct Diagram {
    base: Arc<FinCat>,
    shape: Arc<FinCat>,
    objects: Vec<Presheaf>,
    arrows: Vec<PresheafMap>,
}

impl Diagram {
    pub fn new(
        base: Arc<FinCat>,
        shape: Arc<FinCat>,
        objects: Vec<Presheaf>,
        arrows: Vec<PresheafMap>,
    ) -> Result<Diagram> {
        let bad = |m: String| Err(Error::ShapeMismatch(m));
        if objects.len() != shape.object_count() || arrows.len() != shape.arrow_count() {
            return bad("diagram tables do not match the shape".into());
        }
        if objects.iter().any(|p| !Arc::ptr_eq(p.base(), &base) && **p.base() != *base) {
            return Err(Error::BaseMismatch);
        }
        for a in shape.arrow_ids() {
            if *arrows[a].source() != objects[shape.source(a)] || *arrows[a].target() != objects[shape.target(a)] {
                return bad(format!("arrow {} has the wrong endpoints", shape.arrow_name(a)));
            }
        }
        for c in shape.objects() {
            if arrows[shape.identity(c)] != PresheafMap::identity(&objects[c]) {
                return bad(format!("identity of {} is not sent to an identity", shape.object_name(c)));
            }
        }
        for a in shape.arrow_ids() {
            for &b in shape.arrows_from(shape.target(a)) {
                if arrows[shape.after(b, a)] != arrows[a].then(&arrows[b])? {
                    return bad(format!(
                        "composite {} . {} is not preserved",
                        shape.arrow_name(b),
                        shape.arrow_name(a)
                    ));
                }
            }
        }
        Ok(Diagram { base, shape, objects, arrows })
    }

    /// A diagram of the given discrete shape.
    pub fn discrete(base: &Arc<FinCat>, objects: Vec<Presheaf>) -> Result<Diagram> {
        let shape = Arc::new(shapes::discrete(objects.len()));
        let arrows = objects.iter().map(PresheafMap::identity).collect();
        Diagram::new(base.clone(), shape, objects, arrows)
    }

    /// The cospan `f: X -> Z <- Y: g`.
    pub fn cospan(f: &PresheafMap, g: &PresheafMap) -> Result<Diagram> {
        if f.target() != g.target() {
            return Err(Error::ShapeMismatch("cospan legs have different targets".into()));
        }
        let shape = Arc::new(shapes::cospan());
        let objects = vec![f.source().clone(), g.source().clone(), f.target().clone()];
        let mut arrows: Vec<Option<PresheafMap>> = vec![None; shape.arrow_count()];
        for c in shape.objects() {
            arrows[shape.identity(c)] = Some(PresheafMap::identity(&objects[c]));
        }
        arrows[shape.arrow_id("p")?] = Some(f.clone());
        arrows[shape.arrow_id("q")?] = Some(g.clone());
        Diagram::new(f.base().clone(), shape, objects, arrows.into_iter().map(Option::unwrap).collect())
    }

    /// The span `X <- W -> Y`.
    pub fn span(f: &PresheafMap, g: &PresheafMap) -> Result<Diagram> {
        if f.source() != g.source() {
            return Err(Error::ShapeMismatch("span legs have different sources".into()));
        }
        let shape = Arc::new(shapes::span());
        // Objects sort as l (apex), r (g's target), s (f's target).
        let objects = vec![f.source().clone(), g.target().clone(), f.target().clone()];
        let mut arrows: Vec<Option<PresheafMap>> = vec![None; shape.arrow_count()];
        for c in shape.objects() {
            arrows[shape.identity(c)] = Some(PresheafMap::identity(&objects[c]));
        }
        arrows[shape.arrow_id("p")?] = Some(f.clone());
        arrows[shape.arrow_id("q")?] = Some(g.clone());
        Diagram::new(f.base().clone(), shape, objects, arrows.into_iter().map(Option::unwrap).collect())
    }

    /// Two parallel maps `f, g: X -> Y`.
    pub fn parallel(f: &PresheafMap, g: &PresheafMap) -> Result<Diagram> {
        if f.source() != g.source() || f.target() != g.target() {
            return Err(Error::ShapeMismatch("parallel maps have different endpoints".into()));
        }
        let shape = Arc::new(shapes::parallel());
        let objects = vec![f.source().clone(), f.target().clone()];
        let mut arrows: Vec<Option<PresheafMap>> = vec![None; shape.arrow_count()];
        for c in shape.objects() {
            arrows[shape.identity(c)] = Some(PresheafMap::identity(&objects[c]));
        }
        arrows[shape.arrow_id("p")?] = Some(f.clone());
        arrows[shape.arrow_id("q")?] = Some(g.clone());
        Diagram::new(f.base().clone(), shape, objects, arrows.into_iter().map(Option::unwrap).collect())
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn shape(&self) -> &Arc<FinCat> {
        &self.shape
    }

    pub fn object(&self, i: ObjId) -> &Presheaf {
        &self.objects[i]
    }

    pub fn arrow_map(&self, a: ArrowId) -> &PresheafMap {
        &self.arrows[a]
    }
}

/// A limit with its cone of projections.
#[derive(Debug, Clone)]
pub struct Limit {
    apex: Presheaf,
    projections: Vec<PresheafMap>,
    tuples: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Limit {
    pub fn apex(&self) -> &Presheaf {
        &self.apex
    }

    pub fn projection(&self, i: ObjId) -> &PresheafMap {
        &self.projections[i]
    }

    pub fn projections(&self) -> &[PresheafMap] {
        &self.projections
    }

    /// The tuple of coordinates of element `x` of the apex at `c`.
    pub fn tuple(&self, c: ObjId, x: usize) -> &[usize] {
        &self.tuples[c][x]
    }

    pub fn find(&self, c: ObjId, tuple: &[usize]) -> Option<usize> {
        self.index[c].get(tuple).copied()
    }

    /// The unique map from a cone into the limit.
    pub fn lift(&self, cone: &[PresheafMap]) -> Result<PresheafMap> {
        if cone.len() != self.projections.len() {
            return Err(Error::ShapeMismatch("cone has the wrong number of legs".into()));
        }
        let cat = self.apex.base();
        let vertex = match cone.first() {
            Some(leg) => leg.source().clone(),
            None => return Err(Error::ShapeMismatch("an empty cone has no vertex; use to_terminal".into())),
        };
        let mut components = Vec::with_capacity(cat.object_count());
        for c in cat.objects() {
            let mut comp = Vec::with_capacity(vertex.size(c));
            for v in 0..vertex.size(c) {
                let t: Vec<usize> = cone.iter().map(|leg| leg.apply(c, v)).collect();
                comp.push(self.find(c, &t).ok_or_else(|| Error::ShapeMismatch("cone does not commute".into()))?);
            }
            components.push(comp);
        }
        PresheafMap::new(vertex, self.apex.clone(), components)
    }
}

pub fn limit(d: &Diagram) -> Result<Limit> {
    limit_with(d, &SizeCaps::current())
}

pub fn limit_with(d: &Diagram, caps: &SizeCaps) -> Result<Limit> {
    let base = d.base.clone();
    let n = d.shape.object_count();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::with_capacity(base.object_count());
    for c in base.objects() {
        let mut out = Vec::new();
        let mut cur = vec![0usize; n];
        enumerate_tuples(d, c, 0, &mut cur, &mut out, caps)?;
        tuples.push(out);
    }
    Ok(assemble_limit(base, &d.objects, tuples))
}

fn enumerate_tuples(
    d: &Diagram,
    c: ObjId,
    i: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    caps: &SizeCaps,
) -> Result<()> {
    let shape = &d.shape;
    if i == cur.len() {
        out.push(cur.clone());
        return caps.check_elements("limit carrier", out.len());
    }
    'value: for x in 0..d.objects[i].size(c) {
        cur[i] = x;
        // Check every shape arrow between coordinates fixed so far.
        for a in shape.arrow_ids() {
            let (s, t) = (shape.source(a), shape.target(a));
            let fixed = (s == i && t <= i) || (t == i && s < i);
            if fixed && d.arrows[a].apply(c, cur[s]) != cur[t] {
                continue 'value;
            }
        }
        enumerate_tuples(d, c, i + 1, cur, out, caps)?;
    }
    Ok(())
}

fn assemble_limit(base: Arc<FinCat>, objects: &[Presheaf], tuples: Vec<Vec<Vec<usize>>>) -> Limit {
    let index: Vec<HashMap<Vec<usize>, usize>> =
        tuples.iter().map(|ts| ts.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect()).collect();
    let names = tuples
        .iter()
        .enumerate()
        .map(|(c, ts)| {
            ts.iter()
                .map(|t| {
                    let parts: Vec<&str> = t.iter().enumerate().map(|(i, &x)| objects[i].element_name(c, x)).collect();
                    format!("({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let action = base
        .arrow_ids()
        .map(|f| {
            let a = base.source(f);
            tuples[base.target(f)]
                .iter()
                .map(|t| {
                    let moved: Vec<usize> = t.iter().enumerate().map(|(i, &x)| objects[i].act(f, x)).collect();
                    index[a][&moved]
                })
                .collect()
        })
        .collect();
    let apex = Presheaf::new_unchecked(base.clone(), names, action);
    let projections = objects
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let comps = tuples.iter().map(|ts| ts.iter().map(|t| t[i]).collect()).collect();
            PresheafMap::new_unchecked(apex.clone(), p.clone(), comps)
        })
        .collect();
    Limit { apex, projections, tuples, index }
}

/// A colimit with its cocone of injections.
#[derive(Debug, Clone)]
pub struct Colimit {
    apex: Presheaf,
    injections: Vec<PresheafMap>,
    /// Per object, the least representative `(shape object, element)` of
    /// each class.
    representatives: Vec<Vec<(ObjId, usize)>>,
}

impl Colimit {
    pub fn apex(&self) -> &Presheaf {
        &self.apex
    }

    pub fn injection(&self, i: ObjId) -> &PresheafMap {
        &self.injections[i]
    }

    pub fn injections(&self) -> &[PresheafMap] {
        &self.injections
    }

    pub fn representative(&self, c: ObjId, x: usize) -> (ObjId, usize) {
        self.representatives[c][x]
    }

    /// The unique map out of the colimit determined by a cocone.
    pub fn desc(&self, cocone: &[PresheafMap]) -> Result<PresheafMap> {
        if cocone.len() != self.injections.len() {
            return Err(Error::ShapeMismatch("cocone has the wrong number of legs".into()));
        }
        let target = match cocone.first() {
            Some(leg) => leg.target().clone(),
            None => return Err(Error::ShapeMismatch("an empty cocone has no vertex; use from_initial".into())),
        };
        let cat = self.apex.base();
        let mut components: Vec<Vec<Option<usize>>> = cat.objects().map(|c| vec![None; self.apex.size(c)]).collect();
        for (i, leg) in cocone.iter().enumerate() {
            for c in cat.objects() {
                for x in 0..leg.source().size(c) {
                    let k = self.injections[i].apply(c, x);
                    let y = leg.apply(c, x);
                    match components[c][k] {
                        Some(prev) if prev != y => {
                            return Err(Error::ShapeMismatch("cocone does not commute".into()));
                        }
                        _ => components[c][k] = Some(y),
                    }
                }
            }
        }
        let components = components.into_iter().map(|v| v.into_iter().map(Option::unwrap).collect()).collect();
        PresheafMap::new(self.apex.clone(), target, components)
    }
}

pub fn colimit(d: &Diagram) -> Result<Colimit> {
    colimit_with(d, &SizeCaps::current())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn colimit_with(d: &Diagram, caps: &SizeCaps) -> Result<Colimit> {
    let shape = &d.shape;
    let base = d.base.clone();
    let m = shape.object_count();
    let mut representatives = Vec::new();
    let mut class_of: Vec<Vec<usize>> = Vec::new();
    for c in base.objects() {
        let mut offset = vec![0; m + 1];
        for i in 0..m {
            offset[i + 1] = offset[i] + d.objects[i].size(c);
        }
        // Union-find keeping the smallest flat index as root.
        let mut parent: Vec<usize> = (0..offset[m]).collect();
        for a in shape.arrow_ids() {
            let (s, t) = (shape.source(a), shape.target(a));
            for x in 0..d.objects[s].size(c) {
                let (u, v) = (find(&mut parent, offset[s] + x), find(&mut parent, offset[t] + d.arrows[a].apply(c, x)));
                if u != v {
                    let (lo, hi) = (u.min(v), u.max(v));
                    parent[hi] = lo;
                }
            }
        }
        let mut reps = Vec::new();
        let mut cls = vec![0; offset[m]];
        let mut root_class = HashMap::new();
        for (k, slot) in cls.iter_mut().enumerate() {
            let r = find(&mut parent, k);
            let id = *root_class.entry(r).or_insert_with(|| {
                let i = (0..m).rfind(|&i| offset[i] <= r && r < offset[i + 1]).unwrap();
                reps.push((i, r - offset[i]));
                reps.len() - 1
            });
            *slot = id;
        }
        caps.check_elements("colimit carrier", reps.len())?;
        representatives.push(reps);
        class_of.push(cls);
    }
    let flat = |c: ObjId, i: ObjId, x: usize| -> usize {
        let off: usize = (0..i).map(|j| d.objects[j].size(c)).sum();
        class_of[c][off + x]
    };
    let names = representatives
        .iter()
        .enumerate()
        .map(|(c, reps)| reps.iter().map(|&(i, x)| format!("{}#{}", d.objects[i].element_name(c, x), i)).collect())
        .collect();
    let action = base
        .arrow_ids()
        .map(|f| {
            let a = base.source(f);
            representatives[base.target(f)].iter().map(|&(i, x)| flat(a, i, d.objects[i].act(f, x))).collect()
        })
        .collect();
    let apex = Presheaf::new_unchecked(base.clone(), names, action);
    let injections = (0..m)
        .map(|i| {
            let comps = base.objects().map(|c| (0..d.objects[i].size(c)).map(|x| flat(c, i, x)).collect()).collect();
            PresheafMap::new_unchecked(d.objects[i].clone(), apex.clone(), comps)
        })
        .collect();
    Ok(Colimit { apex, injections, representatives })
}

/// The terminal presheaf: the limit of the empty diagram.
pub fn terminal(base: Arc<FinCat>) -> Presheaf {
    Presheaf::constant(base, 1)
}

/// The initial presheaf: the colimit of the empty diagram.
pub fn initial(base: Arc<FinCat>) -> Presheaf {
    Presheaf::constant(base, 0)
}

/// A pullback square over a cospan `f: X -> Z <- Y: g`.
#[derive(Debug, Clone)]
pub struct Pullback {
    limit: Limit,
    first_leg: PresheafMap,
}

impl Pullback {
    pub fn apex(&self) -> &Presheaf {
        self.limit.apex()
    }

    /// Projection to the source of the first leg.
    pub fn left(&self) -> &PresheafMap {
        self.limit.projection(0)
    }

    /// Projection to the source of the second leg.
    pub fn right(&self) -> &PresheafMap {
        self.limit.projection(1)
    }

    pub fn pair(&self, c: ObjId, x: usize) -> (usize, usize) {
        let t = self.limit.tuple(c, x);
        (t[0], t[1])
    }

    pub fn find(&self, c: ObjId, left: usize, right: usize) -> Option<usize> {
        let z = self.first_leg.apply(c, left);
        self.limit.find(c, &[left, right, z])
    }

    /// The gap map `(a, b)` for a commuting pair of maps.
    pub fn lift(&self, a: &PresheafMap, b: &PresheafMap) -> Result<PresheafMap> {
        let z = a.then(&self.first_leg)?;
        self.limit.lift(&[a.clone(), b.clone(), z])
    }
}

pub fn pullback(f: &PresheafMap, g: &PresheafMap) -> Result<Pullback> {
    Ok(Pullback { limit: limit(&Diagram::cospan(f, g)?)?, first_leg: f.clone() })
}

/// Pulls `u: A -> B` back along `g: Z -> B`, returning `A x_B Z -> Z`.
pub fn base_change(u: &PresheafMap, g: &PresheafMap) -> Result<PresheafMap> {
    Ok(pullback(u, g)?.right().clone())
}

pub fn product(base: &Arc<FinCat>, factors: &[Presheaf]) -> Result<Limit> {
    limit(&Diagram::discrete(base, factors.to_vec())?)
}

pub fn coproduct(base: &Arc<FinCat>, summands: &[Presheaf]) -> Result<Colimit> {
    colimit(&Diagram::discrete(base, summands.to_vec())?)
}

/// The coproduct `⊔ A_i -> ⊔ B_i` of a family of maps.
pub fn coproduct_of_maps(base: &Arc<FinCat>, maps: &[PresheafMap]) -> Result<PresheafMap> {
    let sources: Vec<Presheaf> = maps.iter().map(|m| m.source().clone()).collect();
    let targets: Vec<Presheaf> = maps.iter().map(|m| m.target().clone()).collect();
    let src = coproduct(base, &sources)?;
    let tgt = coproduct(base, &targets)?;
    if maps.is_empty() {
        return Ok(PresheafMap::identity(src.apex()));
    }
    let legs: Vec<PresheafMap> =
        maps.iter().enumerate().map(|(i, m)| m.then(tgt.injection(i))).collect::<Result<_>>()?;
    src.desc(&legs)
}
