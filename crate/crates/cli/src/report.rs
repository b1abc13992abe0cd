//! JSON reports. Objects are key-sorted and every rational is a "p/q"
//! string, so identical inputs give byte-identical output.

use quasikernel::classify::{AdaptedWitness, NormalWitness, ProperWitness};
use quasikernel::kernel::JeViolation;
use quasikernel::oracle::Discrepancy;
use quasikernel::polytope::HPolytope;
use quasikernel::rational::{self, Rational};
use quasikernel::refine::Certificate;
use quasikernel::towers::{Check, LimitKernel, TowerRefinement};
use quasikernel::{
    ClassificationReport, Kernel, NormalityReport, Partition, ProbabilityMeasure, Subset, Verdict,
    VertexSet,
};
use serde_json::{json, Value};

pub const REPORT_SCHEMA: &str = "quasikernel-report/1";

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Value,
    pub result: Value,
}

impl Report {
    pub fn to_value(&self) -> Value {
        json!({
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "result": self.result,
        })
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn q(v: &Rational) -> Value {
    Value::String(rational::format(v))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

pub fn rows(rows: &[Vec<Rational>]) -> Value {
    Value::Array(rows.iter().map(|r| vector(r)).collect())
}

pub fn kernel(k: &Kernel) -> Value {
    rows(k.rows())
}

pub fn blocks(p: &Partition) -> Value {
    json!(p.blocks())
}

pub fn subset(s: &Subset) -> Value {
    json!(s.indices())
}

pub fn vertices(vs: &VertexSet) -> Value {
    Value::Array(
        vs.iter()
            .map(|v: &ProbabilityMeasure| vector(v.masses()))
            .collect(),
    )
}

pub fn hrep(p: &HPolytope) -> Value {
    json!({
        "dimension": p.dimension(),
        "generated_constraints": p.generated_constraints(),
        "equalities": p
            .constraints()
            .map(|(row, rhs)| json!({"coefficients": vector(row), "rhs": q(rhs)}))
            .collect::<Vec<_>>(),
        "nonnegativity": true,
        "normalization": true,
    })
}

pub fn violation(v: &JeViolation, e: &Partition) -> Value {
    json!({
        "atom": e.blocks()[v.atom],
        "point": v.target,
        "lhs": q(&v.lhs),
        "rhs": q(&v.rhs),
    })
}

fn proper_witness(w: &ProperWitness) -> Value {
    json!({
        "atom": w.block,
        "point": w.point,
        "lhs": q(&w.lhs),
        "rhs": q(&w.rhs),
    })
}

fn adapted_witness(w: &AdaptedWitness, e: &Partition) -> Value {
    json!({
        "point": w.point,
        "violated_constraint": violation(&w.violation, e),
    })
}

fn normal_witness(w: &NormalWitness, e: &Partition) -> Value {
    match w {
        NormalWitness::NotAdapted(a) => json!({"not_adapted": adapted_witness(a, e)}),
        NormalWitness::DeltaMass { point, mass } => {
            json!({"delta_mass": {"point": point, "mass": q(mass)}})
        }
    }
}

fn verdict<W>(v: &Verdict<W>, witness: impl Fn(&W) -> Value) -> Value {
    match v {
        Verdict::Holds => json!({"holds": true}),
        Verdict::Fails(w) => json!({"holds": false, "witness": witness(w)}),
    }
}

pub fn classification(c: &ClassificationReport, e: &Partition) -> Value {
    json!({
        "proper": verdict(&c.proper, proper_witness),
        "adapted": verdict(&c.adapted, |w| adapted_witness(w, e)),
        "normal": verdict(&c.normal, |w| normal_witness(w, e)),
        "support": subset(&c.support),
    })
}

pub fn normality(r: &NormalityReport) -> Value {
    json!({
        "statements": r.statements,
        "all_equal": r.all_equal(),
    })
}

pub fn certificate(c: &Certificate) -> Value {
    json!({
        "set_measurable": c.set_measurable,
        "refinement": c.refinement,
        "proper": c.proper,
        "normal": c.normal,
        "je_nonempty": c.je_nonempty,
    })
}

pub fn checks(cs: &[Check]) -> Value {
    Value::Array(
        cs.iter()
            .map(|c| json!({"label": c.label, "holds": c.holds}))
            .collect(),
    )
}

pub fn limit(l: &LimitKernel) -> Value {
    json!({
        "kernel": kernel(&l.kernel),
        "governing": blocks(l.kernel.governing()),
        "stable": subset(&l.stable),
        "live": subset(&l.live),
        "unstable": l.unstable,
    })
}

pub fn tower_refinement(t: &TowerRefinement) -> Value {
    json!({
        "kernel": kernel(&t.kernel),
        "level_set": subset(&t.level_set),
        "restriction_set": subset(&t.restriction_set),
        "intersection_vertices": vertices(&t.intersection),
        "normal": t.normal,
        "matches_intersection": t.matches_intersection,
    })
}

pub fn discrepancies(ds: &[Discrepancy]) -> Value {
    Value::Array(
        ds.iter()
            .map(|d| json!({"item": d.item, "fast": d.fast, "oracle": d.oracle}))
            .collect(),
    )
}
