//! The named `verify` suites. Each runs exhaustively on the document's site
//! and returns its findings together with a verdict.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde_json::{json, Value};
use toposcalc_core::corpus::Corpus;
use toposcalc_core::factor::{check_orthogonal, cover_closed_factor, dense_closed_factor, is_closed, is_dense};
use toposcalc_core::forcing::{
    compile, compiled_topology, diagonal_tower, forces, is_hypercovering, tc_factor, ForcingCondition, Theta,
};
use toposcalc_core::presheaf::{base_change, diagonal, image_factorization, is_n_connected};
use toposcalc_core::topology::{enumerate_closure_operators, enumerate_topologies, lt_to_groth};
use toposcalc_core::{sites, Connectivity, FinCat, GrothTopology, LocalizationHandle, PresheafMap, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Bijections,
    Frame,
    Modality,
    ForcingEquivalences,
    Degeneracy,
}

/// Topology counts of the built-in sites, found by both enumerations.
const PINNED: [(&str, usize); 5] =
    [("terminal", 2), ("interval", 4), ("parallel-pair", 4), ("square", 16), ("monoid3", 3)];

/// Distributivity is checked over all subsets up to this many topologies.
const SUBSET_CAP: usize = 16;

/// Collects named pass/fail checks.
struct Checks {
    rows: Vec<Value>,
    ok: bool,
}

impl Checks {
    fn new() -> Checks {
        Checks { rows: Vec::new(), ok: true }
    }

    fn add(&mut self, name: &str, passed: usize, total: usize) {
        self.ok &= passed == total;
        self.rows.push(json!({"check": name, "passed": passed, "total": total}));
    }
}

pub fn run(suite: Suite, cat: &Arc<FinCat>, extra_sigma: &[PresheafMap]) -> Result<(Value, bool)> {
    let corpus = Corpus::new(cat)?;
    let topologies = enumerate_topologies(&corpus.omega)?;
    let mut checks = Checks::new();
    let mut info = serde_json::Map::new();
    info.insert("topologies".into(), json!(topologies.len()));
    match suite {
        Suite::Bijections => bijections(&corpus, &topologies, &mut checks, &mut info)?,
        Suite::Frame => frame(&corpus, &topologies, &mut checks),
        Suite::Modality => modality(&corpus, &topologies, &mut checks)?,
        Suite::ForcingEquivalences => forcing(&corpus, extra_sigma, &mut checks)?,
        Suite::Degeneracy => degeneracy(&corpus, &topologies, &mut checks)?,
    }
    info.insert("checks".into(), Value::Array(checks.rows));
    Ok((Value::Object(info), checks.ok))
}

fn bijections(
    corpus: &Corpus,
    topologies: &[GrothTopology],
    checks: &mut Checks,
    info: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let lts = enumerate_closure_operators(&corpus.omega)?;
    info.insert("closure_operators".into(), json!(lts.len()));
    checks.add("counts agree", usize::from(lts.len() == topologies.len()), 1);
    let cat = corpus.omega.base();
    if let Some((name, _)) = sites::test_sites().into_iter().find(|(_, c)| c == cat) {
        let pinned = PINNED.iter().find(|(n, _)| *n == name).map(|p| p.1).expect("every site is pinned");
        info.insert("site".into(), json!(name));
        info.insert("pinned".into(), json!(pinned));
        checks.add("pinned count", usize::from(topologies.len() == pinned), 1);
    }
    let converted: BTreeSet<GrothTopology> = lts.iter().map(lt_to_groth).collect();
    let matched = topologies.iter().filter(|g| converted.contains(g)).count();
    checks.add("closure operators give the enumerated topologies", matched, topologies.len());
    let round = topologies.iter().filter(|g| g.to_lt().map(|j| &lt_to_groth(&j) == *g).unwrap_or(false)).count();
    checks.add("round trip through closure operators", round, topologies.len());
    let mut order = 0;
    for j in &lts {
        for k in &lts {
            order += usize::from(j.leq(k) == lt_to_groth(j).leq(&lt_to_groth(k)));
        }
    }
    checks.add("order isomorphism", order, lts.len() * lts.len());
    Ok(())
}

fn frame(corpus: &Corpus, ts: &[GrothTopology], checks: &mut Checks) {
    let n = ts.len();
    let index: HashMap<&GrothTopology, usize> = ts.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let (mut meet, mut join) = (vec![vec![None; n]; n], vec![vec![None; n]; n]);
    for i in 0..n {
        for k in 0..n {
            meet[i][k] = index.get(&ts[i].meet(&ts[k])).copied();
            join[i][k] = index.get(&ts[i].join(&ts[k])).copied();
        }
    }
    let closed = meet.iter().chain(&join).flatten().filter(|x| x.is_some()).count();
    checks.add("meets and joins stay in the poset", closed, 2 * n * n);
    if closed != 2 * n * n {
        return;
    }
    let meet: Vec<Vec<usize>> = meet.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
    let join: Vec<Vec<usize>> = join.into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
    let bottom = index[&GrothTopology::minimal(&corpus.omega)];
    if n <= SUBSET_CAP {
        let mut joins = vec![bottom; 1 << n];
        for mask in 1usize..1 << n {
            joins[mask] = join[joins[mask & (mask - 1)]][mask.trailing_zeros() as usize];
        }
        let mut good = 0;
        for g in 0..n {
            let mut rhs = vec![bottom; 1 << n];
            for mask in 1usize..1 << n {
                rhs[mask] = join[rhs[mask & (mask - 1)]][meet[g][mask.trailing_zeros() as usize]];
                good += usize::from(meet[g][joins[mask]] == rhs[mask]);
            }
        }
        checks.add("meets distribute over joins of all subsets", good, n * ((1 << n) - 1));
    } else {
        let mut good = 0;
        for g in 0..n {
            for a in 0..n {
                for b in 0..n {
                    good += usize::from(meet[g][join[a][b]] == join[meet[g][a]][meet[g][b]]);
                }
            }
        }
        checks.add("meets distribute over binary joins", good, n * n * n);
    }
}

fn modality(corpus: &Corpus, topologies: &[GrothTopology], checks: &mut Checks) -> Result<()> {
    let monos: Vec<&PresheafMap> = corpus.monos.iter().chain(corpus.maps.iter().filter(|m| m.is_mono())).collect();
    let cospans = corpus.cospans();
    let (mut factored, mut squares, mut orthogonal) = (0, 0, 0);
    let (mut covers, mut stable, mut stable_total) = (0, 0, 0);
    for g in topologies {
        let j = g.closure_operator();
        for m in &monos {
            let f = dense_closed_factor(m, &j)?;
            factored += usize::from(f.composite() == **m && is_dense(&j, &f.left)? && is_closed(&j, &f.right)?);
        }
        let dense: Vec<&&PresheafMap> = monos.iter().filter(|m| is_dense(&j, m).unwrap_or(false)).collect();
        let closed: Vec<&&PresheafMap> = monos.iter().filter(|m| is_closed(&j, m).unwrap_or(false)).collect();
        for u in &dense {
            for f in &closed {
                squares += 1;
                orthogonal += usize::from(check_orthogonal(u, f)?);
            }
        }
        let cover = g.covering_class();
        for f in &corpus.maps {
            covers += usize::from(cover_closed_factor(f, g).composite() == *f);
        }
        for (f, h) in &cospans {
            for (u, v) in [(f, h), (h, f)] {
                if cover.member(u) {
                    stable_total += 1;
                    stable += usize::from(cover.member(&base_change(u, v)?));
                }
            }
        }
    }
    checks.add("dense-closed factorizations", factored, monos.len() * topologies.len());
    checks.add("dense monos are orthogonal to closed monos", orthogonal, squares);
    checks.add("cover-closed factorizations", covers, corpus.maps.len() * topologies.len());
    checks.add("covering maps are stable under base change", stable, stable_total);
    Ok(())
}

fn forcing(corpus: &Corpus, extra: &[PresheafMap], checks: &mut Checks) -> Result<()> {
    let om = &corpus.omega;
    let mut sigmas: Vec<Vec<PresheafMap>> = corpus.maps.iter().map(|f| vec![f.clone()]).collect();
    if !extra.is_empty() {
        sigmas.push(extra.to_vec());
    }
    let (mut surj, mut mono, mut forced, mut total) = (0, 0, 0, 0);
    for sigma in &sigmas {
        let fc = |s: Vec<PresheafMap>, t: Theta| ForcingCondition::new(s, t);
        let g_surj = compiled_topology(om, &fc(sigma.clone(), Theta::Surj)?)?;
        let images = sigma.iter().map(|f| image_factorization(f).im).collect();
        surj += usize::from(g_surj == compiled_topology(om, &fc(images, Theta::Iso)?)?);
        let g_mono = compiled_topology(om, &fc(sigma.clone(), Theta::Mono)?)?;
        mono += usize::from(g_mono == compiled_topology(om, &fc(sigma.iter().map(diagonal).collect(), Theta::Iso)?)?);
        for theta in [Theta::Iso, Theta::Surj, Theta::Mono, Theta::Conn(0), Theta::ConnInf] {
            let handle = compile(om, &fc(sigma.clone(), theta)?);
            for f in sigma {
                total += 1;
                if let Ok(h) = &handle {
                    forced += usize::from(forces(h, theta, f)?);
                }
            }
        }
    }
    checks.add("forcing surjectivity is forcing the image to be iso", surj, sigmas.len());
    checks.add("forcing mono is forcing the diagonal to be iso", mono, sigmas.len());
    checks.add("generators acquire the forced property", forced, total);
    Ok(())
}

fn degeneracy(corpus: &Corpus, topologies: &[GrothTopology], checks: &mut Checks) -> Result<()> {
    let om = &corpus.omega;
    let n = corpus.maps.len();
    let mut tower = 0;
    let mut conn = 0;
    for f in &corpus.maps {
        tower += usize::from(diagonal_tower(f, 2).map(|t| t[2].is_mono()).unwrap_or(false));
        conn += usize::from(is_n_connected(f, Connectivity::Infinite) == f.is_iso());
    }
    checks.add("second diagonals are mono", tower, n);
    checks.add("infinitely connected maps are isos", conn, n);
    let sieves: Vec<_> = om.base().objects().flat_map(|c| om.sieves(c).to_vec()).collect();
    let (mut residual, mut hyper) = (0, 0);
    for g in topologies {
        residual += usize::from(tc_factor(&LocalizationHandle::new(g.clone())).is_ok());
        for (m, s) in corpus.monos.iter().zip(&sieves) {
            hyper += usize::from(is_hypercovering(m, g)? == g.is_covering(s));
        }
    }
    checks.add("every localization is topological", residual, topologies.len());
    checks.add("hypercovering monos are covering sieves", hyper, corpus.monos.len() * topologies.len());
    Ok(())
}
