//! Command dispatch: each command turns a document into report results.

use std::sync::Arc;

use serde_json::{json, Map, Value};
use toposcalc_core::classifier::Subobject;
use toposcalc_core::factor::{cover_closed_factor, dense_closed_factor, is_closed, is_dense, Factorization};
use toposcalc_core::forcing::{compile, compiled_topology, forces, minimality_check, ForcingCondition, Theta};
use toposcalc_core::topology::enumerate_topologies;
use toposcalc_core::{FinCat, GrothTopology, LocalizationHandle, Omega, Presheaf, PresheafMap, Sieve};

use crate::dsl::{DslError, SiteDocument};
use crate::report::Dot;
use crate::suites::{self, Suite};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FactorKind {
    DenseClosed,
    CoverClosed,
}

#[derive(Debug, Clone)]
pub enum Command {
    EnumerateTopologies,
    Omega,
    Sheafify {
        presheaf: String,
    },
    Factor {
        map: String,
        kind: FactorKind,
    },
    /// Maps parsed from a sigma file, or every document map when `None`.
    Force {
        sigma: Option<Vec<(String, PresheafMap)>>,
        theta: Theta,
    },
    Verify {
        suite: Suite,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::EnumerateTopologies => "enumerate-topologies",
            Command::Omega => "omega",
            Command::Sheafify { .. } => "sheafify",
            Command::Factor { .. } => "factor",
            Command::Force { .. } => "force",
            Command::Verify { .. } => "verify",
        }
    }
}

/// What a command produced, before it is wrapped into a report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub verdict: bool,
    pub dot: Option<String>,
    /// Notes for standard error.
    pub notes: Vec<String>,
}

fn core(e: toposcalc_core::Error) -> CliError {
    CliError::Input(DslError::Validation(e))
}

fn sieve_json(cat: &FinCat, s: &Sieve) -> Value {
    json!(s.generators(cat).into_iter().map(|g| cat.arrow_name(g)).collect::<Vec<_>>())
}

/// Covering sieves by object, each as its generators.
fn topology_json(g: &GrothTopology) -> Value {
    let cat = g.base();
    let mut out = Map::new();
    for c in cat.objects() {
        out.insert(cat.object_name(c).into(), Value::Array(g.covers(c).map(|s| sieve_json(cat, s)).collect()));
    }
    Value::Object(out)
}

fn topology_label(g: &GrothTopology) -> String {
    let cat = g.base();
    let parts: Vec<String> = cat
        .objects()
        .map(|c| {
            let sieves: Vec<String> = g
                .covers(c)
                .map(|s| {
                    format!("[{}]", s.generators(cat).iter().map(|&f| cat.arrow_name(f)).collect::<Vec<_>>().join(","))
                })
                .collect();
            format!("{}: {}", cat.object_name(c), sieves.join(" "))
        })
        .collect();
    parts.join("; ")
}

fn elements_json(p: &Presheaf) -> Value {
    let cat = p.base();
    Value::Object(cat.objects().map(|c| (cat.object_name(c).to_string(), json!(p.names(c)))).collect())
}

fn map_json(m: &PresheafMap) -> Value {
    let cat = m.base();
    let (s, t) = (m.source(), m.target());
    Value::Object(
        cat.objects()
            .map(|c| {
                let comp: Map<String, Value> = (0..s.size(c))
                    .map(|x| (s.element_name(c, x).to_string(), json!(t.element_name(c, m.apply(c, x)))))
                    .collect();
                (cat.object_name(c).to_string(), Value::Object(comp))
            })
            .collect(),
    )
}

fn subobject_json(s: &Subobject) -> Value {
    let p = s.ambient();
    let cat = p.base();
    Value::Object(
        cat.objects()
            .map(|c| {
                (cat.object_name(c).to_string(), json!(s.elements(c).map(|x| p.element_name(c, x)).collect::<Vec<_>>()))
            })
            .collect(),
    )
}

/// Covering pairs of a finite poset given by `leq`.
fn hasse(n: usize, leq: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let lt = |i: usize, k: usize| i != k && leq(i, k);
    let mut out = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if lt(i, k) && !(0..n).any(|m| lt(i, m) && lt(m, k)) {
                out.push((i, k));
            }
        }
    }
    out
}

pub struct Context<'a> {
    pub doc: &'a SiteDocument,
    pub strict: bool,
}

impl Context<'_> {
    fn omega(&self) -> Result<Arc<Omega>, CliError> {
        Omega::new(self.doc.category.clone()).map_err(core)
    }

    fn topology(&self, omega: &Arc<Omega>, notes: &mut Vec<String>) -> Result<GrothTopology, CliError> {
        let g = self.doc.topology(omega, self.strict).map_err(CliError::Input)?;
        if let (false, Some(entries)) = (self.strict, &self.doc.coverage) {
            let listed: usize = entries.iter().map(|e| e.sieves.len()).sum();
            if g.cover_count() != listed {
                notes.push(format!("coverage generates {} covering sieves from {listed} listed", g.cover_count()));
            }
        }
        Ok(g)
    }
}

pub fn run(cmd: &Command, cx: &Context<'_>) -> Result<Outcome, CliError> {
    let mut notes = Vec::new();
    let out = match cmd {
        Command::EnumerateTopologies => enumerate(cx, &mut notes)?,
        Command::Omega => omega(cx)?,
        Command::Sheafify { presheaf } => sheafify(cx, presheaf, &mut notes)?,
        Command::Factor { map, kind } => factor(cx, map, *kind, &mut notes)?,
        Command::Force { sigma, theta } => force(cx, sigma.as_deref(), *theta, &mut notes)?,
        Command::Verify { suite } => {
            let extra: Vec<PresheafMap> = cx.doc.maps.iter().map(|m| m.map.clone()).collect();
            let (results, verdict) = suites::run(*suite, &cx.doc.category, &extra).map_err(core)?;
            let mut results = results;
            results
                .as_object_mut()
                .expect("object")
                .insert("suite".into(), json!(clap::ValueEnum::to_possible_value(suite).expect("named").get_name()));
            (results, verdict, None)
        }
    };
    Ok(Outcome { results: out.0, verdict: out.1, dot: out.2, notes })
}

type Parts = (Value, bool, Option<String>);

fn enumerate(cx: &Context<'_>, notes: &mut Vec<String>) -> Result<Parts, CliError> {
    let om = cx.omega()?;
    let ts = enumerate_topologies(&om).map_err(core)?;
    let current = if cx.doc.coverage.is_some() { Some(cx.topology(&om, notes)?) } else { None };
    let edges = hasse(ts.len(), |i, k| ts[i].leq(&ts[k]));
    let mut dot = Dot::new();
    for (i, g) in ts.iter().enumerate() {
        dot.node(&format!("t{i}"), &topology_label(g));
    }
    for (i, k) in &edges {
        dot.edge(&format!("t{i}"), &format!("t{k}"), None);
    }
    let mut results = Map::new();
    results.insert("count".into(), json!(ts.len()));
    results.insert("topologies".into(), Value::Array(ts.iter().map(topology_json).collect()));
    results.insert("covering_relations".into(), json!(edges.iter().map(|(i, k)| [i, k]).collect::<Vec<_>>()));
    if let Some(g) = current {
        results.insert("document_topology".into(), json!(ts.iter().position(|t| *t == g)));
    }
    Ok((Value::Object(results), true, Some(dot.finish("topologies", "BT"))))
}

fn omega(cx: &Context<'_>) -> Result<Parts, CliError> {
    let om = cx.omega()?;
    let cat = om.base();
    let mut objects = Map::new();
    let mut dot = Dot::new();
    for c in cat.objects() {
        let sieves = om.sieves(c);
        let name = cat.object_name(c);
        for (i, s) in sieves.iter().enumerate() {
            dot.node(&format!("{name}/{i}"), &s.describe(cat));
        }
        for (i, k) in hasse(sieves.len(), |i, k| om.leq(c, i, k)) {
            dot.edge(&format!("{name}/{i}"), &format!("{name}/{k}"), None);
        }
        objects.insert(
            name.into(),
            json!({
                "size": sieves.len(),
                "maximal": om.maximal(c),
                "sieves": sieves.iter().map(|s| sieve_json(cat, s)).collect::<Vec<_>>(),
            }),
        );
    }
    Ok((json!({"objects": objects}), true, Some(dot.finish("omega", "BT"))))
}

fn sheafify(cx: &Context<'_>, name: &str, notes: &mut Vec<String>) -> Result<Parts, CliError> {
    let x = &cx.doc.presheaf(name).ok_or_else(|| CliError::Usage(format!("no presheaf named `{name}`")))?.presheaf;
    let om = cx.omega()?;
    let handle = LocalizationHandle::new(cx.topology(&om, notes)?);
    let sf = handle.sheafify(x).map_err(core)?;
    let is_sheaf = handle.is_sheaf(sf.sheaf()).map_err(core)?;
    let results = json!({
        "presheaf": name,
        "topology": topology_json(handle.topology()),
        "input_is_sheaf": handle.is_sheaf(x).map_err(core)?,
        "separated": elements_json(sf.separated().presheaf()),
        "sheaf": elements_json(sf.sheaf()),
        "unit": map_json(sf.unit()),
        "unit_is_iso": sf.unit().is_iso(),
        "output_is_sheaf": is_sheaf,
    });
    Ok((results, is_sheaf, None))
}

fn factor_dot(f: &Factorization, left: &str, right: &str) -> String {
    let mut dot = Dot::new();
    let size = |p: &Presheaf| format!("{:?}", p.sizes());
    dot.node("source", &format!("X {}", size(f.left.source())));
    dot.node("middle", &format!("M {}", size(f.left.target())));
    dot.node("target", &format!("Y {}", size(f.right.target())));
    dot.edge("source", "middle", Some(left));
    dot.edge("middle", "target", Some(right));
    dot.edge("source", "target", Some("f"));
    dot.finish("factorization", "LR")
}

fn factor(cx: &Context<'_>, name: &str, kind: FactorKind, notes: &mut Vec<String>) -> Result<Parts, CliError> {
    let m = &cx.doc.map(name).ok_or_else(|| CliError::Usage(format!("no map named `{name}`")))?.map;
    let om = cx.omega()?;
    let g = cx.topology(&om, notes)?;
    let j = g.closure_operator();
    let (fac, checks, labels) = match kind {
        FactorKind::DenseClosed => {
            let fac = dense_closed_factor(m, &j).map_err(core)?;
            let checks = json!({
                "left_dense": is_dense(&j, &fac.left).map_err(core)?,
                "right_closed": is_closed(&j, &fac.right).map_err(core)?,
            });
            (fac, checks, ("dense", "closed"))
        }
        FactorKind::CoverClosed => {
            let fac = cover_closed_factor(m, &g);
            let checks = json!({
                "left_covering": g.covering_class().member(&fac.left),
                "right_closed": is_closed(&j, &fac.right).map_err(core)?,
            });
            (fac, checks, ("covering", "closed"))
        }
    };
    let mut checks = checks;
    checks.as_object_mut().unwrap().insert("composite".into(), json!(fac.composite() == *m));
    let verdict = checks.as_object().unwrap().values().all(|v| v == &json!(true));
    let results = json!({
        "map": name,
        "kind": match kind { FactorKind::DenseClosed => "dense-closed", FactorKind::CoverClosed => "cover-closed" },
        "topology": topology_json(&g),
        "middle": subobject_json(&fac.middle),
        "left": map_json(&fac.left),
        "checks": checks,
    });
    let dot = factor_dot(&fac, labels.0, labels.1);
    Ok((results, verdict, Some(dot)))
}

fn force(
    cx: &Context<'_>,
    sigma: Option<&[(String, PresheafMap)]>,
    theta: Theta,
    notes: &mut Vec<String>,
) -> Result<Parts, CliError> {
    let maps: Vec<(String, PresheafMap)> = match sigma {
        Some(s) => s.to_vec(),
        None => cx.doc.maps.iter().map(|m| (m.name.clone(), m.map.clone())).collect(),
    };
    if maps.is_empty() {
        return Err(CliError::Usage("no maps to force: pass --sigma or add map blocks".into()));
    }
    let om = cx.omega()?;
    let fc = ForcingCondition::new(maps.iter().map(|m| m.1.clone()).collect(), theta).map_err(core)?;
    let g = compiled_topology(&om, &fc).map_err(core)?;
    let handle = LocalizationHandle::new(g.clone());
    let mut transcript = Vec::new();
    for (name, f) in &maps {
        let lf = handle.sheafify_map(f).map_err(core)?;
        transcript.push(json!({
            "map": name,
            "sheafified_sizes": [lf.source().sizes(), lf.target().sizes()],
            "forced": forces(&handle, theta, f).map_err(core)?,
        }));
    }
    let compiled = compile(&om, &fc);
    let minimal = match enumerate_topologies(&om) {
        Ok(ts) => Some(minimality_check(&fc, &g, &ts).map_err(core)?),
        Err(e) => {
            notes.push(format!("minimality not checked: {e}"));
            None
        }
    };
    let verdict = compiled.is_ok() && minimal != Some(false);
    let mut results = Map::new();
    results.insert("theta".into(), json!(theta.to_string()));
    results.insert("sigma".into(), json!(maps.iter().map(|m| &m.0).collect::<Vec<_>>()));
    results.insert("topology".into(), topology_json(&g));
    results.insert("transcript".into(), Value::Array(transcript));
    results.insert("minimal".into(), json!(minimal));
    if let Err(e) = compiled {
        results.insert("error".into(), json!(e.to_string()));
    }
    Ok((Value::Object(results), verdict, None))
}
