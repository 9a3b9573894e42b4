//! Inputs shared by the benchmarks.

use std::sync::Arc;

use toposcalc_core::presheaf::coproduct;
use toposcalc_core::topology::enumerate_topologies;
use toposcalc_core::{sites, FinCat, GrothTopology, Omega, Presheaf};

pub struct Fixture {
    pub name: &'static str,
    pub cat: Arc<FinCat>,
    pub omega: Arc<Omega>,
    pub topologies: Vec<GrothTopology>,
    /// The coproduct of all representables and `1 ⊔ 1`.
    pub presheaf: Presheaf,
}

pub fn fixtures() -> Vec<Fixture> {
    sites::test_sites()
        .into_iter()
        .map(|(name, cat)| {
            let omega = Omega::new(cat.clone()).expect("omega");
            let topologies = enumerate_topologies(&omega).expect("enumeration");
            let mut parts: Vec<Presheaf> =
                cat.objects().map(|c| Presheaf::yoneda(cat.clone(), c).expect("yoneda")).collect();
            parts.push(Presheaf::constant(cat.clone(), 2));
            let presheaf = coproduct(&cat, &parts).expect("coproduct").apex().clone();
            Fixture { name, cat, omega, topologies, presheaf }
        })
        .collect()
}
