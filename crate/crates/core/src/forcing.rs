//! Forcing conditions `⟨Σ = θ⟩` compiled to Grothendieck topologies,
//! topological parts, hypercoverings, and the two factorizations of a
//! localization.
//!
//! Diagonal towers are computed to height [`TOWER_HEIGHT`]. Every level
//! from [`TOWER_MONO_HEIGHT`] on is checked to be mono, so the levels past
//! it are isomorphisms and contribute only maximal sieves.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::classifier::Omega;
use crate::error::{Error, Result};
use crate::presheaf::{diagonal, image_factorization, Presheaf, PresheafMap, TOWER_MONO_HEIGHT};
use crate::sheaf::LocalizationHandle;
use crate::topology::GrothTopology;

/// Height to which diagonal towers are computed.
pub const TOWER_HEIGHT: usize = 4;

/// The property a forcing condition asks of its generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theta {
    Iso,
    Surj,
    Mono,
    /// `n`-connected, `n >= -1`.
    Conn(i64),
    ConnInf,
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::Iso => f.write_str("iso"),
            Theta::Surj => f.write_str("surj"),
            Theta::Mono => f.write_str("mono"),
            Theta::Conn(n) => write!(f, "conn:{n}"),
            Theta::ConnInf => f.write_str("conn:inf"),
        }
    }
}

impl FromStr for Theta {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Theta, String> {
        match s {
            "iso" => Ok(Theta::Iso),
            "surj" => Ok(Theta::Surj),
            "mono" => Ok(Theta::Mono),
            "conn:inf" => Ok(Theta::ConnInf),
            _ => match s.strip_prefix("conn:").map(str::parse::<i64>) {
                Some(Ok(n)) if n >= -1 => Ok(Theta::Conn(n)),
                Some(Ok(n)) => Err(format!("connectivity {n} is below -1")),
                _ => Err(format!("unknown property `{s}` (expected iso, surj, mono, conn:<n> or conn:inf)")),
            },
        }
    }
}

/// A finite set of maps together with the property to force on them.
#[derive(Debug, Clone)]
pub struct ForcingCondition {
    sigma: Vec<PresheafMap>,
    theta: Theta,
}

impl ForcingCondition {
    pub fn new(sigma: Vec<PresheafMap>, theta: Theta) -> Result<ForcingCondition> {
        if let Some(first) = sigma.first() {
            if sigma.iter().any(|m| !m.source().same_base(first.source())) {
                return Err(Error::BaseMismatch);
            }
        }
        if matches!(theta, Theta::Conn(n) if n < -1) {
            return Err(Error::ShapeMismatch("connectivity below -1".into()));
        }
        Ok(ForcingCondition { sigma, theta })
    }

    pub fn sigma(&self) -> &[PresheafMap] {
        &self.sigma
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }
}

/// `[u, Δu, Δ²u, ..., Δ^height u]`, checking that the tower is mono from
/// [`TOWER_MONO_HEIGHT`] on.
pub fn diagonal_tower(u: &PresheafMap, height: usize) -> Result<Vec<PresheafMap>> {
    let mut tower = vec![u.clone()];
    for k in 1..=height {
        let next = diagonal(&tower[k - 1]);
        tower.push(next);
    }
    for (k, d) in tower.iter().enumerate().skip(TOWER_MONO_HEIGHT) {
        if !d.is_mono() {
            return Err(Error::TowerNotStable(k));
        }
    }
    Ok(tower)
}

fn images_of_tower(sigma: &[PresheafMap], levels: usize) -> Result<Vec<PresheafMap>> {
    let levels = levels.min(TOWER_HEIGHT + 1);
    let mut out = Vec::new();
    for u in sigma {
        let tower = diagonal_tower(u, TOWER_HEIGHT)?;
        out.extend(tower.into_iter().take(levels).map(|d| image_factorization(&d).im));
    }
    Ok(out)
}

/// The topology the rewrite rules assign to a forcing condition, before
/// any verification.
pub fn compiled_topology(omega: &Arc<Omega>, fc: &ForcingCondition) -> Result<GrothTopology> {
    let sigma = fc.sigma();
    let monos = match fc.theta {
        Theta::Surj => images_of_tower(sigma, 1)?,
        Theta::Conn(n) => images_of_tower(sigma, (n + 2) as usize)?,
        Theta::Iso | Theta::ConnInf => images_of_tower(sigma, TOWER_HEIGHT + 1)?,
        Theta::Mono => {
            let diagonals: Vec<PresheafMap> = sigma.iter().map(diagonal).collect();
            images_of_tower(&diagonals, TOWER_HEIGHT + 1)?
        }
    };
    GrothTopology::generate_from_monos(omega, &monos)
}

/// Whether `Lf` has the property `theta` in the topos of sheaves.
/// Surjectivity there is local surjectivity: the image is a covering mono.
pub fn forces(handle: &LocalizationHandle, theta: Theta, f: &PresheafMap) -> Result<bool> {
    let lf = handle.sheafify_map(f)?;
    let cover = handle.topology().covering_class();
    let levels = match theta {
        Theta::Iso | Theta::ConnInf => return Ok(lf.is_iso()),
        Theta::Mono => return Ok(lf.is_mono()),
        Theta::Surj => 1,
        Theta::Conn(n) => (n + 2) as usize,
    };
    let tower = diagonal_tower(&lf, TOWER_HEIGHT)?;
    Ok(tower.iter().take(levels.min(TOWER_HEIGHT + 1)).all(|d| cover.member(d)))
}

/// Compiles a forcing condition and verifies that every generator acquires
/// the forced property after sheafification.
pub fn compile(omega: &Arc<Omega>, fc: &ForcingCondition) -> Result<LocalizationHandle> {
    let handle = LocalizationHandle::new(compiled_topology(omega, fc)?);
    for (index, f) in fc.sigma().iter().enumerate() {
        if !forces(&handle, fc.theta, f)? {
            return Err(match fc.theta {
                Theta::Iso => Error::IsoForcingIncomplete(index),
                theta => Error::ForcingVerificationFailed { theta: theta.to_string(), index },
            });
        }
    }
    Ok(handle)
}

/// Whether `compiled` is the least topology among `topologies` whose
/// sheafification gives every generator the property.
pub fn minimality_check(fc: &ForcingCondition, compiled: &GrothTopology, topologies: &[GrothTopology]) -> Result<bool> {
    if topologies.is_empty() {
        return Err(Error::EnumerationUnavailable("no enumerated topologies were supplied".into()));
    }
    let mut found = false;
    for g in topologies {
        let handle = LocalizationHandle::new(g.clone());
        let mut forcing = true;
        for f in fc.sigma() {
            if !forces(&handle, fc.theta, f)? {
                forcing = false;
                break;
            }
        }
        if forcing {
            if !compiled.leq(g) {
                return Ok(false);
            }
            found |= g == compiled;
        }
    }
    Ok(found)
}

/// The topology generated by the images of the whole diagonal tower of
/// every map in `sigma`.
pub fn topological_part(omega: &Arc<Omega>, sigma: &[PresheafMap]) -> Result<GrothTopology> {
    GrothTopology::generate_from_monos(omega, &images_of_tower(sigma, TOWER_HEIGHT + 1)?)
}

/// Whether every level of the diagonal tower of `f` is a covering map.
/// The test is made to height 2 and asserted unchanged at height 4.
pub fn is_hypercovering(f: &PresheafMap, g: &GrothTopology) -> Result<bool> {
    let cover = g.covering_class();
    let tower = diagonal_tower(f, TOWER_HEIGHT)?;
    let short = tower[..=TOWER_MONO_HEIGHT].iter().all(|d| cover.member(d));
    let long = tower.iter().all(|d| cover.member(d));
    if short != long {
        return Err(Error::TowerNotStable(TOWER_HEIGHT));
    }
    Ok(short)
}

/// The factorization of a localization through its topological part.
#[derive(Debug)]
pub struct TcFactorization {
    /// The localization generated by the monos the original one inverts.
    pub topological: LocalizationHandle,
    /// Number of representable sieve monos checked for the residual leg.
    pub monos_checked: usize,
    /// Whether the residual leg inverts no mono beyond isomorphisms.
    pub residual_cotopological: bool,
}

/// Splits a localization into its topological part and a residual leg, and
/// checks that the residual is trivial.
pub fn tc_factor(handle: &LocalizationHandle) -> Result<TcFactorization> {
    let om = handle.topology().omega().clone();
    let cat = om.base().clone();
    let mut inverted = Vec::new();
    let mut monos = Vec::new();
    for c in cat.objects() {
        for s in om.sieves(c) {
            let m = om.sieve_mono(s);
            if handle.inverts(&m)? {
                inverted.push(m.clone());
            }
            monos.push(m);
        }
    }
    let topological = LocalizationHandle::new(GrothTopology::generate_from_monos(&om, &inverted)?);
    // The residual acts on sheaves for the topological part: it is
    // cotopological when the only monos there it inverts are isos.
    let mut residual_cotopological = true;
    for m in &monos {
        let lm = topological.sheafify_map(m)?;
        if handle.inverts(&lm)? && !lm.is_iso() {
            residual_cotopological = false;
        }
    }
    if topological.topology() != handle.topology() || !residual_cotopological {
        return Err(Error::ResidualNotTrivial);
    }
    Ok(TcFactorization { topological, monos_checked: monos.len(), residual_cotopological })
}

/// Corpus results of factoring `Sh(G') -> PSh` through `Sh(G)` for `G ⊆ G'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocConsReport {
    /// Presheaves `X` for which `L'(X -> L X)` is an isomorphism.
    pub factors_through: usize,
    pub presheaves_checked: usize,
    /// Maps between `G'`-sheaves inverted by `L'` exactly when they are isos.
    pub conservative: usize,
    pub maps_checked: usize,
}

impl LocConsReport {
    pub fn holds(&self) -> bool {
        self.factors_through == self.presheaves_checked && self.conservative == self.maps_checked
    }
}

/// For nested topologies `G ⊆ G'`, checks that `L'` factors through `L`
/// (the localization leg) and that `L'` restricted to `G'`-sheaves is
/// conservative, on the given presheaves and maps.
pub fn loc_cons_factor(
    small: &LocalizationHandle,
    big: &LocalizationHandle,
    presheaves: &[Presheaf],
    maps: &[PresheafMap],
) -> Result<LocConsReport> {
    if !small.topology().leq(big.topology()) {
        return Err(Error::NotNested);
    }
    let mut factors_through = 0;
    for x in presheaves {
        let unit = small.sheafify(x)?.unit().clone();
        if big.inverts(&unit)? {
            factors_through += 1;
        }
    }
    let mut conservative = 0;
    for f in maps {
        let h = big.sheafify_map(f)?;
        if big.inverts(&h)? == h.is_iso() {
            conservative += 1;
        }
    }
    Ok(LocConsReport { factors_through, presheaves_checked: presheaves.len(), conservative, maps_checked: maps.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Sieve;
    use crate::presheaf::{coproduct, iterated_diagonal};
    use crate::sites;
    use crate::topology::enumerate_topologies;

    fn interval() -> (Arc<Omega>, PresheafMap, GrothTopology) {
        let cat = Arc::new(sites::interval());
        let om = Omega::new(cat.clone()).unwrap();
        let f = cat.arrow_id("f").unwrap();
        let yf = PresheafMap::yoneda_arrow(cat.clone(), f).unwrap();
        let dense = GrothTopology::generate(&om, &[Sieve::from_arrows(&cat, cat.target(f), &[f]).unwrap()]);
        (om, yf, dense)
    }

    #[test]
    fn theta_round_trips_through_text() {
        for t in [Theta::Iso, Theta::Surj, Theta::Mono, Theta::Conn(-1), Theta::Conn(3), Theta::ConnInf] {
            assert_eq!(t.to_string().parse::<Theta>().unwrap(), t);
        }
        assert!("conn:-2".parse::<Theta>().is_err());
        assert!("epi".parse::<Theta>().is_err());
    }

    #[test]
    fn empty_sigma_compiles_to_minimal() {
        let (om, _, _) = interval();
        for theta in [Theta::Iso, Theta::Surj, Theta::Mono, Theta::Conn(0), Theta::ConnInf] {
            let h = compile(&om, &ForcingCondition::new(vec![], theta).unwrap()).unwrap();
            assert_eq!(*h.topology(), GrothTopology::minimal(&om));
        }
    }

    #[test]
    fn forcing_the_empty_cover() {
        let (om, _, _) = interval();
        let one = Presheaf::constant(om.base().clone(), 1);
        let fc = ForcingCondition::new(vec![PresheafMap::from_initial(&one)], Theta::Surj).unwrap();
        assert_eq!(*compile(&om, &fc).unwrap().topology(), GrothTopology::maximal(&om));
    }

    #[test]
    fn interval_examples() {
        let (om, yf, dense) = interval();
        let topologies = enumerate_topologies(&om).unwrap();
        for theta in [Theta::Iso, Theta::Surj, Theta::ConnInf, Theta::Conn(1)] {
            let fc = ForcingCondition::new(vec![yf.clone()], theta).unwrap();
            let h = compile(&om, &fc).unwrap();
            assert_eq!(*h.topology(), dense);
            assert!(minimality_check(&fc, h.topology(), &topologies).unwrap());
        }
        assert!(is_hypercovering(&yf, &dense).unwrap());
        assert!(!is_hypercovering(&yf, &GrothTopology::minimal(&om)).unwrap());
        let h = LocalizationHandle::new(dense.clone());
        let tc = tc_factor(&h).unwrap();
        assert_eq!(*tc.topological.topology(), dense);
    }

    #[test]
    fn terminal_site_examples() {
        let cat = Arc::new(sites::terminal());
        let om = Omega::new(cat.clone()).unwrap();
        let one = Presheaf::constant(cat.clone(), 1);
        let two = coproduct(&cat, &[one.clone(), one.clone()]).unwrap();
        let point = two.injection(0).clone();
        let fc = ForcingCondition::new(vec![point], Theta::Iso).unwrap();
        let h = compile(&om, &fc).unwrap();
        assert_eq!(*h.topology(), GrothTopology::maximal(&om));
        assert!(minimality_check(&fc, h.topology(), &enumerate_topologies(&om).unwrap()).unwrap());
        // The fold 2 -> 1 is surjective; its diagonal 2 -> 4 has image
        // classified by the empty sieve, which forces everything.
        let fold = PresheafMap::to_terminal(two.apex());
        let d = iterated_diagonal(&fold, 1);
        assert!(!d.is_surjection() && d.is_mono());
        assert_eq!(topological_part(&om, std::slice::from_ref(&fold)).unwrap(), GrothTopology::maximal(&om));
        assert_eq!(
            topological_part(&om, &[fold.clone(), PresheafMap::identity(&one)]).unwrap(),
            topological_part(&om, &[fold]).unwrap()
        );
    }

    #[test]
    fn tower_is_stable() {
        for (_, cat) in sites::test_sites() {
            let two = Presheaf::constant(cat.clone(), 2);
            let three = Presheaf::constant(cat.clone(), 3);
            for f in crate::presheaf::maps_between(&three, &two).unwrap() {
                let t = diagonal_tower(&f, TOWER_HEIGHT).unwrap();
                assert!(t[2].is_iso() || t[2].is_mono());
            }
        }
    }

    #[test]
    fn nested_check_rejects_reversed_order() {
        let (om, _, dense) = interval();
        let min = LocalizationHandle::new(GrothTopology::minimal(&om));
        let d = LocalizationHandle::new(dense);
        assert!(loc_cons_factor(&min, &d, &[], &[]).is_ok());
        assert_eq!(loc_cons_factor(&d, &min, &[], &[]).unwrap_err(), Error::NotNested);
    }
}
