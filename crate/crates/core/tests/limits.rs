//! Finite limits and colimits against hom-counting oracles, and finite
//! colimit closure of the classes of inverted and covering maps.

use toposcalc_core::corpus::Corpus;
use toposcalc_core::presheaf::{
    colimit, coproduct, coproduct_of_maps, count_maps, limit, maps_between, product, pullback, Diagram,
};
use toposcalc_core::topology::enumerate_topologies;
use toposcalc_core::{sites, LocalizationHandle, Presheaf, PresheafMap};

fn small_sites() -> Vec<(&'static str, Corpus)> {
    ["terminal", "interval", "parallel-pair"]
        .into_iter()
        .map(|n| (n, Corpus::new(&sites::by_name(n).unwrap()).unwrap()))
        .collect()
}

/// Maps `t -> p` counted against commuting pairs `t -> x`, `t -> y`.
#[test]
fn pullbacks_represent_commuting_pairs() {
    for (name, corpus) in small_sites() {
        let cospans = corpus.cospans();
        for (f, g) in cospans.iter().step_by(7) {
            let pb = pullback(f, g).unwrap();
            for t in &corpus.presheaves {
                let mut pairs = 0u128;
                for a in maps_between(t, f.source()).unwrap() {
                    let fa = a.then(f).unwrap();
                    for b in maps_between(t, g.source()).unwrap() {
                        pairs += u128::from(b.then(g).unwrap() == fa);
                    }
                }
                assert_eq!(count_maps(t, pb.apex()).unwrap(), pairs, "{name}");
            }
            // The carrier at each object is the set-level pullback.
            for c in f.base().objects() {
                let n = (0..f.source().size(c))
                    .flat_map(|x| (0..g.source().size(c)).map(move |y| (x, y)))
                    .filter(|&(x, y)| f.apply(c, x) == g.apply(c, y))
                    .count();
                assert_eq!(pb.apex().size(c), n);
            }
        }
    }
}

#[test]
fn products_and_coproducts_count_homs() {
    for (name, corpus) in small_sites() {
        let ps = &corpus.presheaves;
        for x in ps {
            for y in ps {
                let prod = product(x.base(), &[x.clone(), y.clone()]).unwrap();
                let sum = coproduct(x.base(), &[x.clone(), y.clone()]).unwrap();
                for t in ps {
                    let into = count_maps(t, prod.apex()).unwrap();
                    assert_eq!(into, count_maps(t, x).unwrap() * count_maps(t, y).unwrap(), "{name}");
                    let out = count_maps(sum.apex(), t).unwrap();
                    assert_eq!(out, count_maps(x, t).unwrap() * count_maps(y, t).unwrap(), "{name}");
                }
            }
        }
    }
}

/// Maps out of a coequalizer biject with maps coequalizing the pair.
#[test]
fn coequalizers_represent_coequalizing_maps() {
    for (name, corpus) in small_sites() {
        for f in &corpus.maps {
            for g in corpus.maps.iter().filter(|g| g.source() == f.source() && g.target() == f.target()) {
                let coeq = colimit(&Diagram::parallel(f, g).unwrap()).unwrap();
                for t in &corpus.presheaves {
                    let direct = maps_between(f.target(), t)
                        .unwrap()
                        .iter()
                        .filter(|h| f.then(h).unwrap() == g.then(h).unwrap())
                        .count() as u128;
                    assert_eq!(count_maps(coeq.apex(), t).unwrap(), direct, "{name}");
                }
                let eq = limit(&Diagram::parallel(f, g).unwrap()).unwrap();
                for t in &corpus.presheaves {
                    let direct = maps_between(t, f.source())
                        .unwrap()
                        .iter()
                        .filter(|h| h.then(f).unwrap() == h.then(g).unwrap())
                        .count() as u128;
                    assert_eq!(count_maps(t, eq.apex()).unwrap(), direct, "{name}");
                }
            }
        }
    }
}

/// The leg `c -> b ⊔_a c` of the pushout of `f: a -> b` along `g: a -> c`.
fn pushout_leg(f: &PresheafMap, g: &PresheafMap) -> PresheafMap {
    // Span objects are ordered apex, target of `g`, target of `f`.
    colimit(&Diagram::span(f, g).unwrap()).unwrap().injection(1).clone()
}

/// Coproducts of members and pushouts of members along corpus maps are
/// members again.
fn assert_colimit_closed(corpus: &Corpus, member: &dyn Fn(&PresheafMap) -> bool) {
    let cat = corpus.omega.base();
    let class: Vec<&PresheafMap> = corpus.maps.iter().filter(|f| member(f)).collect();
    for (i, f) in class.iter().enumerate() {
        for k in class.iter().skip(i).step_by(3) {
            assert!(member(&coproduct_of_maps(cat, &[(*f).clone(), (*k).clone()]).unwrap()), "coproduct");
        }
        for other in corpus.maps.iter().filter(|o| o.source() == f.source()) {
            assert!(member(&pushout_leg(f, other)), "pushout");
        }
    }
}

#[test]
fn inverted_and_covering_maps_are_closed_under_finite_colimits() {
    for (_, corpus) in small_sites() {
        for g in enumerate_topologies(&corpus.omega).unwrap() {
            let cover = g.covering_class();
            assert_colimit_closed(&corpus, &|f| cover.member(f));
            let h = LocalizationHandle::new(g);
            assert_colimit_closed(&corpus, &|f| h.inverts(f).unwrap());
        }
    }
}

#[test]
fn initial_and_terminal_are_empty_limits() {
    for (_, cat) in sites::test_sites() {
        let empty = limit(&Diagram::discrete(&cat, vec![]).unwrap()).unwrap();
        assert!(cat.objects().all(|c| empty.apex().size(c) == 1));
        let none = colimit(&Diagram::discrete(&cat, vec![]).unwrap()).unwrap();
        assert!(cat.objects().all(|c| none.apex().size(c) == 0));
        assert_eq!(*empty.apex(), Presheaf::constant(cat.clone(), 1));
    }
}
