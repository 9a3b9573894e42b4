//! Laws checked on random presheaves over the free sites `a -> b` and
//! `a ⇉ b`, against every topology on the site.

use std::sync::Arc;

use proptest::prelude::*;
use toposcalc_core::classifier::{classify, pullback_of_truth, subobjects};
use toposcalc_core::factor::closure;
use toposcalc_core::forcing::diagonal_tower;
use toposcalc_core::presheaf::{image_factorization, is_surjection_via_nerve, maps_between};
use toposcalc_core::topology::enumerate_topologies;
use toposcalc_core::{sites, FinCat, LocalizationHandle, Omega, Presheaf, PresheafMap};

fn site(two_arrows: bool) -> Arc<FinCat> {
    Arc::new(if two_arrows { sites::parallel_pair() } else { sites::interval() })
}

/// A presheaf on a site whose non-identity arrows all go `a -> b`: carriers
/// of the given sizes and one function `X(b) -> X(a)` per arrow.
fn presheaf(cat: &Arc<FinCat>, na: usize, tables: &[Vec<usize>]) -> Presheaf {
    let nb = tables[0].len();
    let mut action = Vec::new();
    let mut next = tables.iter();
    for f in cat.arrow_ids() {
        if cat.is_identity(f) {
            action.push((0..[na, nb][cat.source(f)]).collect());
        } else {
            action.push(next.next().expect("one table per arrow").clone());
        }
    }
    Presheaf::from_sizes(cat.clone(), &[na, nb], action).unwrap()
}

fn arb_presheaf(cat: Arc<FinCat>) -> impl Strategy<Value = Presheaf> {
    let arrows = cat.non_identities().count();
    (1usize..4, 0usize..4).prop_flat_map(move |(na, nb)| {
        let cat = cat.clone();
        prop::collection::vec(prop::collection::vec(0..na, nb), arrows).prop_map(move |t| presheaf(&cat, na, &t))
    })
}

fn arb_site_presheaf() -> impl Strategy<Value = Presheaf> {
    any::<bool>().prop_flat_map(|two| arb_presheaf(site(two)))
}

/// Two presheaves on one site and an index choosing a map between them.
fn arb_map() -> impl Strategy<Value = Option<PresheafMap>> {
    any::<bool>()
        .prop_flat_map(|two| (arb_presheaf(site(two)), arb_presheaf(site(two)), any::<prop::sample::Index>()))
        .prop_map(|(x, y, i)| {
            let maps = maps_between(&x, &y).unwrap();
            (!maps.is_empty()).then(|| maps[i.index(maps.len())].clone())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sheafification_laws(x in arb_site_presheaf()) {
        let om = Omega::new(x.base().clone()).unwrap();
        for g in enumerate_topologies(&om).unwrap() {
            let h = LocalizationHandle::new(g);
            let lx = h.sheafify(&x).unwrap();
            prop_assert!(h.is_sheaf(lx.sheaf()).unwrap());
            prop_assert_eq!(lx.unit().is_iso(), h.is_sheaf(&x).unwrap());
            prop_assert!(h.sheafify(lx.sheaf()).unwrap().unit().is_iso());
        }
    }

    #[test]
    fn classification_round_trips(x in arb_site_presheaf()) {
        let om = Omega::new(x.base().clone()).unwrap();
        let lattice = subobjects(&x).unwrap();
        for s in lattice.elements() {
            prop_assert_eq!(&pullback_of_truth(&om, &classify(&om, s)), s);
        }
        // Subobject lattices are distributive.
        for i in 0..lattice.len() {
            for j in 0..lattice.len() {
                for k in 0..lattice.len() {
                    prop_assert_eq!(lattice.meet(i, lattice.join(j, k)), lattice.join(lattice.meet(i, j), lattice.meet(i, k)));
                }
            }
        }
    }

    #[test]
    fn closures_are_closure_operators(x in arb_site_presheaf()) {
        let om = Omega::new(x.base().clone()).unwrap();
        let lattice = subobjects(&x).unwrap();
        for g in enumerate_topologies(&om).unwrap() {
            let j = g.closure_operator();
            for s in lattice.elements() {
                let c = closure(&j, s);
                prop_assert!(s.leq(&c));
                prop_assert_eq!(&closure(&j, &c), &c);
                for t in lattice.elements() {
                    prop_assert_eq!(closure(&j, &s.meet(t)), c.meet(&closure(&j, t)));
                }
            }
        }
    }

    #[test]
    fn image_factorization_laws(u in arb_map()) {
        let Some(u) = u else { return Ok(()) };
        let im = image_factorization(&u);
        prop_assert!(im.coim.is_surjection());
        prop_assert!(im.im.is_mono());
        prop_assert_eq!(&im.coim.then(&im.im).unwrap(), &u);
        prop_assert_eq!(is_surjection_via_nerve(&u), u.is_surjection());
        let tower = diagonal_tower(&u, 3).unwrap();
        prop_assert!(tower[1].is_mono() || !u.is_mono());
        prop_assert!(tower[2].is_mono());
    }

    #[test]
    fn inversion_splits_over_images(u in arb_map()) {
        let Some(u) = u else { return Ok(()) };
        let om = Omega::new(u.base().clone()).unwrap();
        let im = image_factorization(&u);
        for g in enumerate_topologies(&om).unwrap() {
            let h = LocalizationHandle::new(g);
            prop_assert_eq!(h.inverts(&u).unwrap(), h.inverts(&im.im).unwrap() && h.inverts(&im.coim).unwrap());
        }
    }
}
