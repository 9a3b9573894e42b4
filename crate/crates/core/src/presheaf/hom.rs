//! Exhaustive enumeration of natural transformations between presheaves.
//!
//! Assigning `φ_b(x)` forces `φ_a(X(f)(x)) = Y(f)(φ_b(x))` for every
//! `f: a -> b`, so the search propagates forced values and only branches on
//! elements nothing has determined yet.

use super::{Presheaf, PresheafMap};
use crate::caps::SizeCaps;
use crate::error::{Error, Result};

struct Search<'a> {
    source: &'a Presheaf,
    target: &'a Presheaf,
    offsets: Vec<usize>,
    /// Flat variable -> (object, element).
    vars: Vec<(usize, usize)>,
    value: Vec<Option<usize>>,
    trail: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(source: &'a Presheaf, target: &'a Presheaf) -> Self {
        let cat = source.base();
        let mut offsets = Vec::with_capacity(cat.object_count() + 1);
        let mut vars = Vec::new();
        offsets.push(0);
        for c in cat.objects() {
            for x in 0..source.size(c) {
                vars.push((c, x));
            }
            offsets.push(vars.len());
        }
        let n = vars.len();
        Search { source, target, offsets, vars, value: vec![None; n], trail: Vec::new() }
    }

    fn assign(&mut self, var: usize, y: usize) -> bool {
        let cat = self.source.base().clone();
        let mut stack = vec![(var, y)];
        while let Some((v, y)) = stack.pop() {
            match self.value[v] {
                Some(prev) if prev != y => return false,
                Some(_) => continue,
                None => {
                    self.value[v] = Some(y);
                    self.trail.push(v);
                }
            }
            let (b, x) = self.vars[v];
            for &f in cat.arrows_into(b) {
                if cat.is_identity(f) {
                    continue;
                }
                let a = cat.source(f);
                let forced = self.offsets[a] + self.source.act(f, x);
                stack.push((forced, self.target.act(f, y)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.value[v] = None;
        }
    }

    fn run(&mut self, from: usize, visit: &mut dyn FnMut(&[Option<usize>]) -> Result<()>) -> Result<()> {
        let Some(var) = (from..self.vars.len()).find(|&v| self.value[v].is_none()) else {
            return visit(&self.value);
        };
        let c = self.vars[var].0;
        for y in 0..self.target.size(c) {
            let mark = self.trail.len();
            if self.assign(var, y) {
                self.run(var + 1, visit)?;
            }
            self.undo(mark);
        }
        Ok(())
    }
}

fn components_of(source: &Presheaf, offsets: &[usize], value: &[Option<usize>]) -> Vec<Vec<usize>> {
    source.base().objects().map(|c| value[offsets[c]..offsets[c + 1]].iter().map(|v| v.unwrap()).collect()).collect()
}

/// All maps `source -> target`, in lexicographic order of their component
/// tables (object by object, element by element).
pub fn maps_between(source: &Presheaf, target: &Presheaf) -> Result<Vec<PresheafMap>> {
    maps_between_with(source, target, &SizeCaps::current())
}

pub fn maps_between_with(source: &Presheaf, target: &Presheaf, caps: &SizeCaps) -> Result<Vec<PresheafMap>> {
    if !source.same_base(target) {
        return Err(Error::BaseMismatch);
    }
    let mut search = Search::new(source, target);
    let offsets = search.offsets.clone();
    let mut out = Vec::new();
    search.run(0, &mut |value| {
        out.push(PresheafMap::new_unchecked(source.clone(), target.clone(), components_of(source, &offsets, value)));
        caps.check_enumeration("hom-set", out.len() as u128)
    })?;
    Ok(out)
}

/// Number of maps `source -> target`, without materializing them.
pub fn count_maps(source: &Presheaf, target: &Presheaf) -> Result<u128> {
    if !source.same_base(target) {
        return Err(Error::BaseMismatch);
    }
    let mut search = Search::new(source, target);
    let mut n = 0u128;
    search.run(0, &mut |_| {
        n += 1;
        Ok(())
    })?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sites;
    use std::sync::Arc;

    /// Brute force over all families of functions, filtered by naturality.
    fn brute_force(source: &Presheaf, target: &Presheaf) -> Vec<Vec<Vec<usize>>> {
        let cat = source.base();
        let slots: Vec<(usize, usize)> = cat.objects().flat_map(|c| (0..source.size(c)).map(move |x| (c, x))).collect();
        let mut out = Vec::new();
        let mut cur = vec![0usize; slots.len()];
        loop {
            let comps: Vec<Vec<usize>> = cat
                .objects()
                .map(|c| slots.iter().zip(&cur).filter(|(s, _)| s.0 == c).map(|(_, &v)| v).collect())
                .collect();
            let ok = comps.iter().enumerate().all(|(c, v)| v.iter().all(|&y| y < target.size(c)));
            if ok && PresheafMap::new(source.clone(), target.clone(), comps.clone()).is_ok() {
                out.push(comps);
            }
            let mut i = slots.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                let bound = target.size(slots[i].0).max(1);
                cur[i] += 1;
                if cur[i] < bound {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    #[test]
    fn matches_brute_force_on_representables() {
        for (_, cat) in sites::test_sites() {
            let mut ps: Vec<Presheaf> = cat.objects().map(|c| Presheaf::yoneda(cat.clone(), c).unwrap()).collect();
            ps.push(Presheaf::constant(cat.clone(), 2));
            ps.push(Presheaf::constant(cat.clone(), 0));
            for p in &ps {
                for q in &ps {
                    let fast: Vec<Vec<Vec<usize>>> =
                        maps_between(p, q).unwrap().iter().map(|m| m.components().to_vec()).collect();
                    let slow = brute_force(p, q);
                    assert_eq!(fast, slow);
                    assert_eq!(count_maps(p, q).unwrap(), slow.len() as u128);
                }
            }
        }
    }

    #[test]
    fn yoneda_lemma_counts() {
        let cat = Arc::new(sites::commutative_square());
        let x = Presheaf::constant(cat.clone(), 3);
        for c in cat.objects() {
            let y = Presheaf::yoneda(cat.clone(), c).unwrap();
            assert_eq!(count_maps(&y, &x).unwrap(), x.size(c) as u128);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let cat = Arc::new(sites::terminal());
        let p = Presheaf::constant(cat.clone(), 4);
        let caps = SizeCaps { enumeration: 10, ..SizeCaps::default() };
        assert!(matches!(maps_between_with(&p, &p, &caps), Err(Error::SizeCapExceeded { .. })));
    }
}
