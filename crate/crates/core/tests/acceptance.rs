//! Acceptance suite: every criterion runs exhaustively on the five test
//! sites and prints one PASS/FAIL line with its runtime against its budget.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toposcalc_core::classifier::{classify, classify_map, pullback_of_truth, subobjects};
use toposcalc_core::corpus::Corpus;
use toposcalc_core::factor::{
    check_orthogonal, closure, cover_closed_factor, dense_closed_factor, is_closed, is_dense,
};
use toposcalc_core::forcing::{
    compile, compiled_topology, diagonal_tower, forces, is_hypercovering, minimality_check, tc_factor,
    ForcingCondition, Theta,
};
use toposcalc_core::presheaf::{base_change, diagonal, image_factorization, is_n_connected};
use toposcalc_core::topology::{enumerate_closure_operators, enumerate_topologies, lt_to_groth};
use toposcalc_core::{sites, Connectivity, FinCat, GrothTopology, LocalizationHandle, PresheafMap, Subobject};

/// Topology counts per test site, from both enumerations.
const TOPOLOGY_COUNTS: [(&str, usize); 5] =
    [("terminal", 2), ("interval", 4), ("parallel-pair", 4), ("square", 16), ("monoid3", 3)];

/// Largest poset on which distributivity is checked over all subsets.
const FRAME_SUBSET_CAP: usize = 20;

const RANDOM_SIGMAS: usize = 20;

struct Site {
    name: &'static str,
    cat: Arc<FinCat>,
    corpus: Corpus,
    topologies: Vec<GrothTopology>,
    handles: Vec<LocalizationHandle>,
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: toposcalc_core::Error) -> String {
    e.to_string()
}

fn classifier(sites: &[Site]) -> Outcome {
    let mut checked = 0;
    for s in sites {
        let om = &s.corpus.omega;
        for c in s.cat.objects() {
            let yc = toposcalc_core::Presheaf::yoneda(s.cat.clone(), c).map_err(err)?;
            ensure(om.size(c) == subobjects(&yc).map_err(err)?.len(), || format!("{}: |Ω| mismatch", s.name))?;
        }
        for m in &s.corpus.monos {
            let chi = classify_map(om, m);
            ensure(pullback_of_truth(om, &chi) == Subobject::image_of(m), || format!("{}: pullback of t", s.name))?;
            checked += 1;
        }
        for x in &s.corpus.presheaves {
            let mut seen = BTreeSet::new();
            for sub in subobjects(x).map_err(err)?.elements() {
                let chi = classify(om, sub);
                ensure(&pullback_of_truth(om, &chi) == sub, || format!("{}: soundness", s.name))?;
                ensure(seen.insert(chi.components().to_vec()), || format!("{}: two subobjects share χ", s.name))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} subobjects"))
}

fn bijection(sites: &[Site]) -> Outcome {
    let mut counts = Vec::new();
    for s in sites {
        let lts = enumerate_closure_operators(&s.corpus.omega).map_err(err)?;
        let expected = TOPOLOGY_COUNTS.iter().find(|(n, _)| *n == s.name).map(|p| p.1);
        ensure(Some(s.topologies.len()) == expected, || format!("{}: {} topologies", s.name, s.topologies.len()))?;
        ensure(lts.len() == s.topologies.len(), || format!("{}: {} closure operators", s.name, lts.len()))?;
        let converted: BTreeSet<GrothTopology> = lts.iter().map(lt_to_groth).collect();
        ensure(converted == s.topologies.iter().cloned().collect(), || format!("{}: sets differ", s.name))?;
        for j in &lts {
            for k in &lts {
                ensure(j.leq(k) == lt_to_groth(j).leq(&lt_to_groth(k)), || format!("{}: order", s.name))?;
            }
        }
        counts.push(format!("{}={}", s.name, lts.len()));
    }
    Ok(counts.join(" "))
}

fn covering_round_trip(sites: &[Site]) -> Outcome {
    let mut checked = 0;
    for s in sites {
        let om = &s.corpus.omega;
        let sieves: Vec<_> = s.cat.objects().flat_map(|c| om.sieves(c).to_vec()).collect();
        for g in &s.topologies {
            let cover = g.covering_class();
            for (m, sieve) in s.corpus.monos.iter().zip(&sieves) {
                ensure(cover.member(m) == g.is_covering(sieve), || format!("{}: {:?}", s.name, sieve))?;
                checked += 1;
            }
            for m in s.corpus.maps.iter().filter(|m| m.is_mono()) {
                ensure(cover.member(m) == g.contains_mono(m).map_err(err)?, || format!("{}: mono", s.name))?;
                checked += 1;
            }
            let members: Vec<PresheafMap> = s.corpus.monos.iter().filter(|m| cover.member(m)).cloned().collect();
            ensure(GrothTopology::generate_from_monos(om, &members).map_err(err)? == *g, || {
                format!("{}: regenerated class differs", s.name)
            })?;
        }
    }
    Ok(format!("{checked} memberships"))
}

fn factorizations(sites: &[Site]) -> Outcome {
    let mut squares = 0;
    for s in sites {
        let monos: Vec<&PresheafMap> =
            s.corpus.monos.iter().chain(s.corpus.maps.iter().filter(|m| m.is_mono())).collect();
        for g in &s.topologies {
            let j = g.to_lt().map_err(err)?;
            for m in &monos {
                let f = dense_closed_factor(m, &j).map_err(err)?;
                ensure(f.composite() == **m, || format!("{}: composite", s.name))?;
                ensure(is_dense(&j, &f.left).map_err(err)? && is_closed(&j, &f.right).map_err(err)?, || {
                    format!("{}: classes", s.name)
                })?;
                // Any dense–closed factorization has the closure as middle.
                let image = Subobject::image_of(m);
                for t in subobjects(m.target()).map_err(err)?.elements() {
                    if !image.leq(t) || closure(&j, t) != *t {
                        continue;
                    }
                    if closure(&j, &image.meet(t)).meet(t) == *t {
                        ensure(*t == f.middle, || format!("{}: second middle object", s.name))?;
                    }
                }
            }
            let dense: Vec<&&PresheafMap> = monos.iter().filter(|m| is_dense(&j, m).unwrap()).collect();
            let closed: Vec<&&PresheafMap> = monos.iter().filter(|m| is_closed(&j, m).unwrap()).collect();
            for u in &dense {
                for f in &closed {
                    ensure(check_orthogonal(u, f).map_err(err)?, || format!("{}: dense not ⊥ closed", s.name))?;
                    squares += 1;
                }
            }
            // Closed monos are exactly the monos right orthogonal to all dense ones.
            for f in &monos {
                let orth =
                    dense.iter().try_fold(true, |acc, u| check_orthogonal(u, f).map(|b| acc && b)).map_err(err)?;
                ensure(orth == is_closed(&j, f).map_err(err)?, || format!("{}: closed ≠ dense⊥", s.name))?;
            }
            let cover = g.covering_class();
            for f in &s.corpus.maps {
                let fac = cover_closed_factor(f, g);
                ensure(fac.composite() == *f, || format!("{}: cover–closed composite", s.name))?;
            }
            for (f, h) in s.corpus.cospans() {
                for (u, v) in [(&f, &h), (&h, &f)] {
                    if cover.member(u) {
                        ensure(cover.member(&base_change(u, v).map_err(err)?), || format!("{}: base change", s.name))?;
                    }
                }
            }
        }
    }
    Ok(format!("{squares} orthogonality pairs"))
}

fn sheafification(sites: &[Site]) -> Outcome {
    let mut cospans = 0;
    for s in sites {
        for h in &s.handles {
            let mut sheaves = Vec::new();
            for x in &s.corpus.presheaves {
                let lx = h.sheafify(x).map_err(err)?;
                ensure(h.is_sheaf(lx.sheaf()).map_err(err)?, || format!("{}: L X not a sheaf", s.name))?;
                ensure(h.sheafify(lx.sheaf()).map_err(err)?.unit().is_iso(), || format!("{}: not idempotent", s.name))?;
                sheaves.push(lx.sheaf().clone());
                if h.is_sheaf(x).map_err(err)? {
                    sheaves.push(x.clone());
                }
            }
            for x in &s.corpus.presheaves {
                let lx = h.sheafify(x).map_err(err)?;
                for y in &sheaves {
                    let from_l = toposcalc_core::presheaf::maps_between(lx.sheaf(), y).map_err(err)?;
                    let composed: BTreeSet<Vec<Vec<usize>>> =
                        from_l.iter().map(|m| lx.unit().then(m).unwrap().components().to_vec()).collect();
                    let direct = toposcalc_core::presheaf::count_maps(x, y).map_err(err)?;
                    ensure(composed.len() == from_l.len() && composed.len() as u128 == direct, || {
                        format!("{}: unit not universal", s.name)
                    })?;
                }
            }
            let pairs = s.corpus.cospans();
            let report = h.check_left_exact(&pairs).map_err(err)?;
            ensure(report.is_exact(), || format!("{}: lex failures {:?}", s.name, report.failures))?;
            cospans += report.checked;
        }
    }
    Ok(format!("{cospans} pullback squares"))
}

fn random_sigmas(site: &Site, seed: u64) -> Vec<Vec<PresheafMap>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..RANDOM_SIGMAS)
        .map(|_| {
            let k = rng.random_range(1..=3);
            site.corpus.maps.choose_multiple(&mut rng, k).cloned().collect()
        })
        .collect()
}

const THETAS: [Theta; 6] = [Theta::Iso, Theta::Surj, Theta::Mono, Theta::Conn(0), Theta::Conn(1), Theta::ConnInf];

fn forcing_equivalences(sites: &[Site]) -> Outcome {
    let mut conditions = 0;
    for (i, s) in sites.iter().enumerate() {
        let om = &s.corpus.omega;
        for sigma in random_sigmas(s, 0x5eed + i as u64) {
            let surj = compile(om, &ForcingCondition::new(sigma.clone(), Theta::Surj).map_err(err)?).map_err(err)?;
            let images: Vec<PresheafMap> = sigma.iter().map(|f| image_factorization(f).im).collect();
            let iso_im = compile(om, &ForcingCondition::new(images, Theta::Iso).map_err(err)?).map_err(err)?;
            for x in &s.corpus.presheaves {
                let lx = surj.sheafify(x).map_err(err)?.sheaf().clone();
                for y in [x, &lx] {
                    ensure(surj.is_sheaf(y).map_err(err)? == iso_im.is_sheaf(y).map_err(err)?, || {
                        format!("{}: local objects differ", s.name)
                    })?;
                }
            }
            for theta in THETAS {
                let fc = ForcingCondition::new(sigma.clone(), theta).map_err(err)?;
                let h = compile(om, &fc).map_err(err)?;
                for f in &sigma {
                    ensure(forces(&h, theta, f).map_err(err)?, || format!("{}: {theta} not forced", s.name))?;
                }
                conditions += 1;
            }
            let mono =
                compiled_topology(om, &ForcingCondition::new(sigma.clone(), Theta::Mono).map_err(err)?).map_err(err)?;
            let diagonals: Vec<PresheafMap> = sigma.iter().map(diagonal).collect();
            let diag_iso =
                compiled_topology(om, &ForcingCondition::new(diagonals, Theta::Iso).map_err(err)?).map_err(err)?;
            ensure(mono == diag_iso, || format!("{}: mono rule", s.name))?;
            // Forcing a union is the join of the forcings.
            let (a, b) = sigma.split_at(sigma.len() / 2);
            let ga =
                compiled_topology(om, &ForcingCondition::new(a.to_vec(), Theta::Iso).map_err(err)?).map_err(err)?;
            let gb =
                compiled_topology(om, &ForcingCondition::new(b.to_vec(), Theta::Iso).map_err(err)?).map_err(err)?;
            let gab =
                compiled_topology(om, &ForcingCondition::new(sigma.clone(), Theta::Iso).map_err(err)?).map_err(err)?;
            ensure(ga.join(&gb) == gab, || format!("{}: union is not the join", s.name))?;
        }
    }
    Ok(format!("{conditions} compiled conditions"))
}

fn minimality(sites: &[Site]) -> Outcome {
    let mut checked = 0;
    for (i, s) in sites.iter().enumerate() {
        let om = &s.corpus.omega;
        for sigma in random_sigmas(s, 0x3141 + i as u64) {
            for theta in THETAS {
                let fc = ForcingCondition::new(sigma.clone(), theta).map_err(err)?;
                let g = compiled_topology(om, &fc).map_err(err)?;
                ensure(minimality_check(&fc, &g, &s.topologies).map_err(err)?, || {
                    format!("{}: {theta} compiled topology is not least", s.name)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} conditions"))
}

fn degeneracy(sites: &[Site]) -> Outcome {
    let mut checked = 0;
    for s in sites {
        for f in &s.corpus.maps {
            let tower = diagonal_tower(f, 2).map_err(err)?;
            ensure(tower[2].is_mono(), || format!("{}: Δ² not mono", s.name))?;
            ensure(is_n_connected(f, Connectivity::Infinite) == f.is_iso(), || format!("{}: ∞-connected", s.name))?;
            checked += 1;
        }
        let om = &s.corpus.omega;
        let sieves: Vec<_> = s.cat.objects().flat_map(|c| om.sieves(c).to_vec()).collect();
        for (g, h) in s.topologies.iter().zip(&s.handles) {
            let tc = tc_factor(h).map_err(err)?;
            ensure(tc.residual_cotopological && tc.topological.topology() == g, || format!("{}: residual", s.name))?;
            for f in &s.corpus.maps {
                if tc.topological.inverts(f).map_err(err)? {
                    ensure(h.inverts(f).map_err(err)?, || format!("{}: W^top ⊄ W", s.name))?;
                }
            }
            for (m, sieve) in s.corpus.monos.iter().zip(&sieves) {
                ensure(is_hypercovering(m, g).map_err(err)? == g.is_covering(sieve), || {
                    format!("{}: hypercovering mono", s.name)
                })?;
                checked += 1;
            }
            for f in &s.corpus.maps {
                is_hypercovering(f, g).map_err(err)?;
            }
        }
    }
    Ok(format!("{checked} maps and monos"))
}

fn frame(sites: &[Site]) -> Outcome {
    let mut summary = Vec::new();
    for s in sites {
        let ts = &s.topologies;
        let n = ts.len();
        let index: HashMap<&GrothTopology, usize> = ts.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let m = ts[i].meet(&ts[k]);
                let j = ts[i].join(&ts[k]);
                meet[i][k] = *index.get(&m).ok_or_else(|| format!("{}: meet outside poset", s.name))?;
                join[i][k] = *index.get(&j).ok_or_else(|| format!("{}: join outside poset", s.name))?;
            }
        }
        let om = &s.corpus.omega;
        let bottom = index[&GrothTopology::minimal(om)];
        if n <= FRAME_SUBSET_CAP {
            // Joins of all subsets, built from the subset without its lowest member.
            let mut joins = vec![bottom; 1 << n];
            for mask in 1usize..1 << n {
                let low = mask.trailing_zeros() as usize;
                joins[mask] = join[joins[mask & (mask - 1)]][low];
            }
            for g in 0..n {
                let mut rhs = vec![bottom; 1 << n];
                for mask in 1usize..1 << n {
                    let low = mask.trailing_zeros() as usize;
                    rhs[mask] = join[rhs[mask & (mask - 1)]][meet[g][low]];
                    ensure(meet[g][joins[mask]] == rhs[mask], || format!("{}: distributivity", s.name))?;
                }
            }
            summary.push(format!("{}: {} subsets", s.name, 1usize << n));
        } else {
            for g in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        ensure(meet[g][join[a][b]] == join[meet[g][a]][meet[g][b]], || {
                            format!("{}: distributivity", s.name)
                        })?;
                    }
                }
            }
            summary.push(format!("{}: binary", s.name));
        }
    }
    Ok(summary.join(", "))
}

fn congruence_laws(sites: &[Site]) -> Outcome {
    let mut checked = 0;
    for s in sites {
        for h in &s.handles {
            let inverted: Vec<bool> =
                s.corpus.maps.iter().map(|f| h.inverts(f)).collect::<Result<_, _>>().map_err(err)?;
            for (i, f) in s.corpus.maps.iter().enumerate() {
                let im = image_factorization(f);
                let parts = h.inverts(&im.im).map_err(err)? && h.inverts(&im.coim).map_err(err)?;
                ensure(inverted[i] == parts, || format!("{}: image/coimage law", s.name))?;
                for (k, g) in s.corpus.maps.iter().enumerate() {
                    if f.target() != g.source() {
                        continue;
                    }
                    let gf = h.inverts(&f.then(g).map_err(err)?).map_err(err)?;
                    let count = [inverted[i], inverted[k], gf].iter().filter(|b| **b).count();
                    ensure(count != 2, || format!("{}: 3-for-2", s.name))?;
                    checked += 1;
                }
            }
            for (f, g) in s.corpus.cospans() {
                for (u, v) in [(&f, &g), (&g, &f)] {
                    if h.inverts(u).map_err(err)? {
                        ensure(h.inverts(&base_change(u, v).map_err(err)?).map_err(err)?, || {
                            format!("{}: base change", s.name)
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} composable pairs"))
}

fn main() -> ExitCode {
    let sites: Vec<Site> = sites::test_sites()
        .into_iter()
        .map(|(name, cat)| {
            let corpus = Corpus::new(&cat).expect("corpus");
            let topologies = enumerate_topologies(&corpus.omega).expect("enumeration");
            let handles = topologies.iter().cloned().map(LocalizationHandle::new).collect();
            Site { name, cat, corpus, topologies, handles }
        })
        .collect();

    type Criterion = (&'static str, u64, fn(&[Site]) -> Outcome);
    let criteria: [Criterion; 10] = [
        ("classifier soundness and completeness", 10, classifier),
        ("closure operators biject with topologies", 60, bijection),
        ("covering classes restrict to topologies", 30, covering_round_trip),
        ("factorization systems", 120, factorizations),
        ("sheafification", 120, sheafification),
        ("forcing equivalences", 120, forcing_equivalences),
        ("minimality of compiled topologies", 60, minimality),
        ("degeneracy of the 1-topos fragment", 60, degeneracy),
        ("frame structure", 60, frame),
        ("congruence predicate laws", 60, congruence_laws),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(&sites);
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let line = format!("[{:>2}] {name} ({:.2}s / {budget}s)", i + 1, elapsed.as_secs_f64());
        match outcome {
            Ok(detail) if !over => println!("PASS {line}: {detail}"),
            Ok(_) => {
                failed += 1;
                println!("FAIL {line}: over budget");
            }
            Err(why) => {
                failed += 1;
                println!("FAIL {line}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
