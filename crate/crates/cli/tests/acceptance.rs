//! Acceptance suite: ten criteria, each printed as one PASS/FAIL line.
//! Runs without the libtest harness; a failing criterion makes the process
//! exit nonzero.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use qk_cli::model::{read_model, Model};
use qk_cli::{run, Command, Emit, RefineMode, Which};
use quasikernel::oracle;
use quasikernel::polytope::split_nontrivial;
use quasikernel::random;
use quasikernel::towers::{compatible_step, limit_kernel, tower_refine, LimitMode};
use quasikernel::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_N: usize = 6;

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        let ok = got == want;
        self.check(ok, || format!("{what}: got {got:?}, want {want:?}"));
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(s: &str) -> Rational {
    rational::parse(s).unwrap()
}

fn v(xs: &[&str]) -> Vec<Rational> {
    xs.iter().map(|s| q(s)).collect()
}

fn pm(xs: &[&str]) -> ProbabilityMeasure {
    ProbabilityMeasure::new(v(xs)).unwrap()
}

fn points(vs: &VertexSet) -> Vec<Vec<Rational>> {
    vs.iter().map(|m| m.masses().to_vec()).collect()
}

fn set(n: usize, xs: &[usize]) -> Subset {
    Subset::from_indices(n, xs).unwrap()
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> Model {
    read_model(&fixtures_dir().join(name)).unwrap()
}

fn kp(m: &Model) -> (Kernel, Partition) {
    let (k, e) = m.kernel_and_partition().unwrap();
    (k.clone(), e.clone())
}

fn blocks(p: &Partition) -> Vec<Vec<usize>> {
    p.to_blocks()
}

fn random_instance(seed: u64) -> (Kernel, Partition) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=MAX_N);
    let e = random::partition(&mut r, n);
    let k = random::any_kernel(&mut r, &e);
    (k, e)
}

// ---------------------------------------------------------------- criterion 1

fn fixture_regression(t: &mut Tally) {
    let start = Instant::now();
    let f1 = fixture("F1_identity.json");
    let f2 = fixture("F2_coin.json");
    let f3 = fixture("F3_leaky.json");
    let f4 = fixture("F4_halfdead.json");
    let f5 = fixture("F5_swap.json");
    let f6 = fixture("F6_twophase.json");
    let f7 = fixture("F7_tower.json");
    let f8 = fixture("F8_collapse.json");

    let (k1, e1) = kp(&f1);
    let (k2, _) = kp(&f2);
    let (k3, e3) = kp(&f3);
    let (k4, e4) = kp(&f4);
    let (k5, e5) = kp(&f5);
    let (k6, e6) = kp(&f6);
    let (k8, e8) = kp(&f8);

    // supports
    t.eq("support F6", k6.support().indices(), vec![0, 1, 2]);
    t.eq("support F1", k1.support().indices(), vec![0, 1, 2]);

    // trace of F6's E on its support, by both methods
    let s6 = k6.support();
    t.eq("trace F6", e6.trace(&s6).blocks, vec![vec![0, 1], vec![2]]);
    t.eq(
        "trace F6 oracle",
        oracle::trace_blocks(&e6, s6.flags()),
        vec![vec![0, 1], vec![2]],
    );

    // validation
    t.check(
        matches!(
            Kernel::new(k5.rows().to_vec(), Partition::trivial(2)),
            Err(Error::Measurability { .. })
        ),
        || "F5 rows under trivial E must fail measurability".into(),
    );

    // algebra
    let mu = ProbabilityMeasure::uniform(4);
    let e7_2 = f7.chain().unwrap().partitions()[1].clone();
    let c2 = conditional_kernel(&mu, &e7_2).unwrap();
    t.eq(
        "push uniform through F7 E2-conditional",
        c2.push(&mu).unwrap().masses().to_vec(),
        mu.masses().to_vec(),
    );
    t.check(k1.compose(&k1).unwrap().equals_kernel(&k1), || {
        "F1 compose".into()
    });
    let f = FunctionVec::new(v(&["1", "0"])).unwrap();
    t.eq(
        "apply F2",
        k2.apply(&f).unwrap().values().to_vec(),
        v(&["1/2", "1/2"]),
    );

    // memberships, fast and by definition
    let half = v(&["1/2", "1/2", "0", "0"]);
    let d0 = v(&["1", "0", "0", "0"]);
    t.check(
        k3.in_je(&Measure::new(half.clone()).unwrap(), &e3).unwrap()
            && oracle::in_je(&k3, &e3, &half),
        || "(1/2,1/2,0,0) in J_E(F3)".into(),
    );
    t.check(
        !k3.in_je(&Measure::new(d0.clone()).unwrap(), &e3).unwrap()
            && !oracle::in_je(&k3, &e3, &d0),
        || "δ_0 not in J_E(F3)".into(),
    );
    let u2 = v(&["1/2", "1/2"]);
    let delta0 = v(&["1", "0"]);
    t.check(
        k5.in_jstar(&Measure::new(u2.clone()).unwrap()).unwrap() && oracle::in_jstar(&k5, &u2),
        || "uniform in J_*(F5)".into(),
    );
    t.check(
        !k5.in_jstar(&Measure::new(delta0.clone()).unwrap()).unwrap()
            && !oracle::in_jstar(&k5, &delta0),
        || "δ_0 not in J_*(F5)".into(),
    );
    t.check(
        k2.in_jstar(&Measure::new(u2.clone()).unwrap()).unwrap(),
        || "uniform in J_*(F2)".into(),
    );

    // classification with witnesses
    match is_proper(&k3, &e3).unwrap() {
        Verdict::Fails(w) => {
            t.eq("F3 proper witness atom", w.block, vec![2, 3]);
            t.eq("F3 proper witness point", w.point, 2);
            t.eq("F3 proper witness lhs", w.lhs, q("3/4"));
        }
        Verdict::Holds => t.check(false, || "F3 must not be proper".into()),
    }
    t.check(
        is_proper(&k6, &e6).unwrap().holds() && oracle::is_proper_def(&k6, &e6),
        || "F6 proper".into(),
    );
    match is_proper(&k8, &e8).unwrap() {
        Verdict::Fails(w) => {
            t.eq("F8 proper witness atom", w.block, vec![1]);
            t.eq("F8 proper witness point", w.point, 1);
        }
        Verdict::Holds => t.check(false, || "F8 must not be proper".into()),
    }
    t.check(
        !oracle::is_proper_def(&k3, &e3) && !oracle::is_proper_def(&k8, &e8),
        || "oracle properness F3/F8".into(),
    );
    t.check(
        is_adapted(&k6, &e6).unwrap().holds() && oracle::is_adapted_def(&k6, &e6),
        || "F6 adapted".into(),
    );
    match is_adapted(&k5, &e5).unwrap() {
        Verdict::Fails(w) => t.eq("F5 adapted witness", w.point, 0),
        Verdict::Holds => t.check(false, || "F5 must not be adapted".into()),
    }
    t.check(!oracle::is_adapted_def(&k5, &e5), || {
        "oracle adapted F5".into()
    });
    t.check(
        is_adapted(&Kernel::zero(e6.clone()), &e6).unwrap().holds(),
        || "zero kernel adapted".into(),
    );
    t.check(
        is_normal(&k6, &e6).unwrap().holds() && oracle::is_normal_def(&k6, &e6),
        || "F6 normal".into(),
    );
    t.check(
        is_normal(&k8, &e8).unwrap().holds() && oracle::is_normal_def(&k8, &e8),
        || "F8 normal".into(),
    );
    t.check(
        !is_normal(&k3, &e3).unwrap().holds() && !oracle::is_normal_def(&k3, &e3),
        || "F3 not normal".into(),
    );

    // Δ-sets and induced partitions
    t.eq(
        "Δ F6 half",
        delta_set(&k6, &Measure::new(half.clone()).unwrap())
            .unwrap()
            .indices(),
        vec![0, 1],
    );
    t.eq(
        "Δ F6 half oracle",
        oracle::delta_set_def(&k6, &half),
        vec![0, 1],
    );
    t.eq("Δ_2 F6", delta_class(&k6, 2).indices(), vec![2]);
    t.eq(
        "Δ δ_3 F6",
        delta_set(&k6, &Measure::new(v(&["0", "0", "0", "1"])).unwrap())
            .unwrap()
            .indices(),
        vec![],
    );
    for (name, k, want) in [
        ("F3", &k3, vec![vec![0, 1], vec![2, 3]]),
        ("F6", &k6, vec![vec![0, 1], vec![2], vec![3]]),
        ("F2", &k2, vec![vec![0, 1]]),
    ] {
        t.eq(
            &format!("sigma_pi {name}"),
            blocks(&sigma_pi(k)),
            want.clone(),
        );
        t.eq(
            &format!("sigma_pi {name} oracle"),
            blocks(&oracle::sigma_pi_def(k)),
            want,
        );
    }
    for (name, k, want) in [
        ("F6", &k6, vec![vec![0, 1], vec![2], vec![3]]),
        ("F8", &k8, vec![vec![0, 1]]),
        ("F3", &k3, vec![vec![0, 1], vec![2, 3]]),
    ] {
        t.eq(&format!("n_pi {name}"), blocks(&n_pi(k)), want.clone());
        t.eq(
            &format!("n_pi {name} oracle"),
            blocks(&oracle::n_pi_def(k)),
            want,
        );
    }
    t.eq(
        "e_pi F8",
        blocks(&e_pi(&k8, &e8).unwrap()),
        vec![vec![0, 1]],
    );
    t.eq(
        "e_pi F6",
        blocks(&e_pi(&k6, &e6).unwrap()),
        vec![vec![0, 1], vec![2], vec![3]],
    );
    t.eq(
        "e_pi F1",
        blocks(&e_pi(&k1, &e1).unwrap()),
        blocks(&Partition::discrete(3)),
    );
    t.eq(
        "e_pi F8 oracle",
        blocks(&oracle::meet(&e8, &oracle::n_pi_def(&k8)).unwrap()),
        vec![vec![0, 1]],
    );

    // normality statements
    for (name, k, e, want) in [
        ("F6", &k6, &e6, [true; 5]),
        ("F5", &k5, &e5, [false; 5]),
        ("F8", &k8, &e8, [true; 5]),
    ] {
        t.eq(
            &format!("normality {name}"),
            normality_report(k, e).unwrap().statements,
            want,
        );
        t.eq(
            &format!("normality {name} oracle"),
            oracle::normality_statements(k, e).unwrap(),
            want,
        );
    }

    // polytopes
    let h3 = je_hrep(&k3, &e3).unwrap();
    t.eq("F3 generated constraints", h3.generated_constraints(), 8);
    let h1 = je_hrep(&k1, &e1).unwrap();
    t.eq(
        "F1 constraints after dropping zero rows",
        h1.num_constraints(),
        0,
    );
    let id3: Vec<Vec<Rational>> = (0..3)
        .map(|i| ProbabilityMeasure::point_mass(3, i).masses().to_vec())
        .collect();
    let mut id3_sorted = id3.clone();
    id3_sorted.sort();
    t.eq(
        "J_E(F1) vertices",
        points(&enum_vertices(&h1).unwrap()),
        id3_sorted.clone(),
    );
    t.eq(
        "J_E(F1) vertices oracle",
        oracle::je_vertices(&k1, &e1),
        id3_sorted,
    );
    t.eq(
        "J_*(F2) vertices",
        points(&enum_vertices(&jstar_hrep(&k2).unwrap()).unwrap()),
        vec![u2.clone()],
    );
    t.eq(
        "J_*(F2) vertices oracle",
        oracle::jstar_vertices(&k2),
        vec![u2.clone()],
    );
    let f6_vertices = vec![v(&["0", "0", "1", "0"]), half.clone()];
    t.eq(
        "J_E(F6) vertices",
        points(&enum_vertices(&je_hrep(&k6, &e6).unwrap()).unwrap()),
        f6_vertices.clone(),
    );
    t.eq(
        "J_E(F6) vertices oracle",
        oracle::je_vertices(&k6, &e6),
        f6_vertices.clone(),
    );
    t.eq(
        "J_E(F5) vertices",
        enum_vertices(&je_hrep(&k5, &e5).unwrap()).unwrap().len(),
        0,
    );
    t.eq(
        "J_E(F5) vertices oracle",
        oracle::je_vertices(&k5, &e5).len(),
        0,
    );
    t.eq(
        "extreme F6",
        points(&extreme_members(&k6, &e6).unwrap()),
        f6_vertices.clone(),
    );
    t.eq(
        "extreme F3",
        points(&extreme_members(&k3, &e3).unwrap()),
        vec![half.clone()],
    );
    t.eq(
        "J_E(F3) oracle",
        oracle::je_vertices(&k3, &e3),
        vec![half.clone()],
    );
    t.eq(
        "extreme F4",
        points(&extreme_members(&k4, &e4).unwrap()),
        vec![delta0.clone()],
    );
    t.eq(
        "J_E(F4) oracle",
        oracle::je_vertices(&k4, &e4),
        vec![delta0.clone()],
    );

    // split and reweight
    let mixed = pm(&["1/4", "1/4", "1/2", "0"]);
    match split_nontrivial(&mixed, &k6, &e6).unwrap() {
        Some(s) => {
            t.eq("split weight", s.weight, q("1/2"));
            t.eq("split first", s.first.masses().to_vec(), half.clone());
            t.eq(
                "split second",
                s.second.masses().to_vec(),
                v(&["0", "0", "1", "0"]),
            );
        }
        None => t.check(false, || "F6 mixed member must split".into()),
    }
    t.check(
        split_nontrivial(&pm(&["0", "0", "1", "0"]), &k6, &e6)
            .unwrap()
            .is_none(),
        || "δ_2 does not split".into(),
    );
    t.check(
        matches!(
            split_nontrivial(&pm(&["1", "0", "0", "0"]), &k6, &e6),
            Err(Error::NotMember)
        ),
        || "δ_0 split is NotMember".into(),
    );
    let h = FunctionVec::new(v(&["2", "2", "0", "0"])).unwrap();
    let rw = reweight_check(&mixed, &h, &k6, &e6).unwrap();
    t.check(rw.member && rw.certified, || "reweight F6 member".into());
    t.eq(
        "reweight density",
        rw.density.map(|d| d.values().to_vec()),
        Some(v(&["2", "2", "0", "0"])),
    );
    let rw = reweight_check(
        &pm(&["1/2", "1/2", "0", "0"]),
        &FunctionVec::new(v(&["2", "0", "0", "0"])).unwrap(),
        &k6,
        &e6,
    )
    .unwrap();
    t.check(!rw.member, || "reweight to δ_0 leaves J".into());

    // refinements
    let r01 = restriction(&k3, &set(4, &[0, 1])).unwrap();
    t.eq(
        "restriction F3 {0,1}",
        r01.rows().to_vec(),
        vec![half.clone(), half.clone(), v(&["0"; 4]), v(&["0"; 4])],
    );
    t.check(is_refinement(&r01, &k3, &e3).unwrap(), || {
        "restriction to {0,1} refines F3".into()
    });
    t.check(
        oracle::je_vertices(&r01, &e3) == oracle::je_vertices(&k3, &e3),
        || "oracle: restriction to {0,1} keeps J".into(),
    );
    let r23 = restriction(&k3, &set(4, &[2, 3])).unwrap();
    t.check(!is_refinement(&r23, &k3, &e3).unwrap(), || {
        "restriction to {2,3} does not refine F3".into()
    });
    t.check(is_full(&set(4, &[0, 1]), &k3, &e3).unwrap(), || {
        "{0,1} full for F3".into()
    });
    t.check(!is_full(&set(4, &[2, 3]), &k3, &e3).unwrap(), || {
        "{2,3} not full for F3".into()
    });
    let p3 = proper_refinement(&k3, &e3).unwrap();
    t.eq(
        "proper refinement D F3",
        p3.restriction_set.indices(),
        vec![0, 1],
    );
    t.eq(
        "proper refinement D F3 oracle",
        oracle::proper_refinement_set(&k3, &e3),
        vec![0, 1],
    );
    t.check(p3.certificate.proper && p3.certificate.refinement, || {
        "F3 proper refinement certificate".into()
    });
    let p1 = proper_refinement(&k1, &e1).unwrap();
    t.check(p1.kernel == k1 && p1.restriction_set.count() == 3, || {
        "F1 proper refinement is F1".into()
    });
    let p8 = proper_refinement(&k8, &e8).unwrap();
    t.eq(
        "proper refinement D F8",
        p8.restriction_set.indices(),
        vec![0],
    );
    t.eq(
        "proper refinement D F8 oracle",
        oracle::proper_refinement_set(&k8, &e8),
        vec![0],
    );
    t.eq(
        "proper refinement F8 rows",
        p8.kernel.rows().to_vec(),
        vec![delta0.clone(), v(&["0", "0"])],
    );
    t.check(p8.certificate.proper && p8.certificate.refinement, || {
        "F8 proper refinement certificate".into()
    });
    let full_s = proper_refinement_on_full(&k3, &e3, &k3.support()).unwrap();
    t.check(full_s.kernel == p3.kernel, || {
        "full-set refinement from S equals proper refinement".into()
    });
    let full01 = proper_refinement_on_full(&k3, &e3, &set(4, &[0, 1])).unwrap();
    t.eq(
        "C for D={0,1}",
        full01.restriction_set.indices(),
        vec![0, 1],
    );
    t.check(full01.kernel == p3.kernel, || {
        "full-set refinement from {0,1}".into()
    });
    t.check(
        matches!(
            proper_refinement_on_full(&k3, &e3, &set(4, &[2, 3])),
            Err(Error::NotFull(_))
        ),
        || "{2,3} NotFull".into(),
    );
    let n3 = normal_refinement(&k3, &e3).unwrap();
    t.check(
        n3.restriction_set.indices() == vec![0, 1] && n3.certificate.normal,
        || "normal refinement F3".into(),
    );
    t.check(
        matches!(normal_refinement(&k5, &e5), Err(Error::Precondition(_))),
        || "normal refinement F5 precondition".into(),
    );
    let n6 = normal_refinement(&k6, &e6).unwrap();
    t.check(
        n6.kernel == k6 && n6.restriction_set == k6.support(),
        || "normal refinement F6 is F6".into(),
    );

    // towers
    let chain = f7.chain().unwrap();
    let parts = chain.partitions();
    let uniform_rows = vec![v(&["1/4"; 4]); 4];
    let block_rows = vec![
        half.clone(),
        half.clone(),
        v(&["0", "0", "1/2", "1/2"]),
        v(&["0", "0", "1/2", "1/2"]),
    ];
    t.eq("conditional F7 E2", c2.rows().to_vec(), block_rows.clone());
    t.eq(
        "conditional F7 E2 oracle",
        oracle::conditional_rows(mu.masses(), &parts[1]),
        block_rows.clone(),
    );
    let c3 = conditional_kernel(&mu, &parts[2]).unwrap();
    let step = compatible_step(&c3, &c2, &parts[2], &parts[1], &mu).unwrap();
    t.check(step.agreement_set.count() == 4 && step.kernel == c3, || {
        "compatible step on F7".into()
    });
    t.check(
        step.kernel
            .compose(&c2)
            .unwrap()
            .equals_kernel(&step.kernel),
        || "ρπ′ = ρ on F7".into(),
    );
    let family = compatible_chain(&mu, chain).unwrap();
    t.check(family.all_hold(), || "F7 compatible family checks".into());
    t.eq(
        "ρ_1",
        family.refined[0].rows().to_vec(),
        Kernel::identity(4).rows().to_vec(),
    );
    t.eq("ρ_2", family.refined[1].rows().to_vec(), block_rows.clone());
    t.eq(
        "ρ_3",
        family.refined[2].rows().to_vec(),
        uniform_rows.clone(),
    );
    let delta_family = compatible_chain(&ProbabilityMeasure::point_mass(4, 0), chain).unwrap();
    t.check(delta_family.all_hold(), || {
        "δ_0 compatible family checks".into()
    });
    t.check(delta_family.refined[1].row_mass(2).is_zero(), || {
        "δ_0 family has zero rows on null atoms".into()
    });
    let c1 = conditional_kernel(&mu, &parts[0]).unwrap();
    let seq = vec![c1.clone(), c2.clone(), c3.clone(), c3.clone(), c3.clone()];
    let lim = limit_kernel(&seq, 2, LimitMode::Strict).unwrap();
    t.check(
        lim.kernel.rows() == &uniform_rows[..] && lim.stable.count() == 4 && lim.live.count() == 4,
        || "F7 limit".into(),
    );
    let levels = ChainSpec::new(
        parts.to_vec(),
        Some(vec![c1, c2.clone(), c3.clone()]),
        Some(mu.clone()),
    )
    .unwrap();
    let tr = tower_refine(&c3, &levels).unwrap();
    t.check(
        tr.kernel == c3
            && tr.restriction_set.count() == 4
            && tr.intersection.as_slice() == [mu.clone()],
        || "tower_refine F7".into(),
    );
    t.check(
        matches!(
            tower_refine(&Kernel::zero(Partition::trivial(4)), &levels),
            Err(Error::Precondition(_))
        ),
        || "tower_refine zero candidate".into(),
    );
    t.check(
        matches!(
            Kernel::new(block_rows.clone(), Partition::trivial(4)),
            Err(Error::Measurability { .. })
        ),
        || "block-conditional under E3".into(),
    );

    // CLI examples
    let f3_path = fixtures_dir().join("F3_leaky.json");
    match run(&Command::Analyze { model: f3_path }) {
        Ok(r) => {
            let c = &r.result["classification"];
            t.check(
                c["proper"]["holds"] == false && c["normal"]["holds"] == false,
                || "analyze F3 verdicts".into(),
            );
            t.check(
                c["proper"]["witness"]["atom"] == serde_json::json!([2, 3])
                    && c["proper"]["witness"]["point"] == 2,
                || "analyze F3 witness".into(),
            );
        }
        Err(e) => t.check(false, || format!("analyze F3: {e}")),
    }
    match run(&Command::Refine {
        model: fixtures_dir().join("F5_swap.json"),
        mode: RefineMode::Normal,
        full: None,
    }) {
        Err(e) => t.check(
            e.exit_code() == 2 && e.to_string().contains("J_E(pi) differs from J_*(pi)"),
            || format!("refine F5 message: {e}"),
        ),
        Ok(_) => t.check(false, || "refine --mode normal F5 must fail".into()),
    }
    match run(&Command::Polytope {
        model: fixtures_dir().join("F6_twophase.json"),
        which: Which::Je,
        emit: Emit::Vertices,
        member: None,
    }) {
        Ok(r) => t.check(
            r.result["vertex_count"] == 2
                && r.result["vertices"][0] == serde_json::json!(["0/1", "0/1", "1/1", "0/1"]),
            || "polytope F6".into(),
        ),
        Err(e) => t.check(false, || format!("polytope F6: {e}")),
    }

    let elapsed = start.elapsed();
    t.check(elapsed < Duration::from_secs(5), || {
        format!("fixture suite took {elapsed:?}")
    });
}

// ---------------------------------------------------------------- criterion 2

fn proper_refinements(t: &mut Tally) {
    for i in 0..1000 {
        let mut r = rng(20_000 + i);
        let n = r.gen_range(1..=MAX_N);
        let e = random::partition(&mut r, n);
        let k = random::quasi_kernel(&mut r, &e);
        let out = proper_refinement(&k, &e).unwrap();
        t.check(is_proper(&out.kernel, &e).unwrap().holds(), || {
            format!("seed {i}: output not proper")
        });
        t.check(oracle::is_proper_def(&out.kernel, &e), || {
            format!("seed {i}: output fails the product rule")
        });
        let nonempty = !enum_vertices(&je_hrep(&k, &e).unwrap()).unwrap().is_empty();
        if nonempty {
            t.check(is_refinement(&out.kernel, &k, &e).unwrap(), || {
                format!("seed {i}: not a refinement")
            });
        }
    }
}

// ---------------------------------------------------------------- criterion 3

fn normal_refinements(t: &mut Tally) {
    let mut accepted = 0;
    let mut seed = 30_000u64;
    while accepted < 500 {
        seed += 1;
        let mut r = rng(seed);
        let n = r.gen_range(1..=MAX_N);
        let e = random::partition(&mut r, n);
        let k = match seed % 4 {
            0 => random::proper_kernel(&mut r, &e),
            1 => random::normal_kernel(&mut r, &e),
            _ => random::quasi_kernel(&mut r, &e),
        };
        if !same_polytope(&je_hrep(&k, &e).unwrap(), &jstar_hrep(&k).unwrap()).unwrap() {
            continue;
        }
        accepted += 1;
        match normal_refinement(&k, &e) {
            Ok(out) => {
                t.check(is_normal(&out.kernel, &e).unwrap().holds(), || {
                    format!("seed {seed}: not normal")
                });
                t.check(is_refinement(&out.kernel, &k, &e).unwrap(), || {
                    format!("seed {seed}: not a refinement")
                });
            }
            Err(err) => t.check(false, || format!("seed {seed}: {err}")),
        }
    }
}

// ---------------------------------------------------------------- criterion 4

fn normality_equivalence(t: &mut Tally) {
    for i in 0..1000 {
        let (k, e) = random_instance(40_000 + i);
        let rep = normality_report(&k, &e).unwrap();
        t.check(rep.all_equal(), || {
            format!("seed {i}: statements {:?}", rep.statements)
        });
    }
}

// ---------------------------------------------------------------- criterion 5

fn proper_normal_adapted(t: &mut Tally) {
    for i in 0..1000 {
        let (k, e) = random_instance(50_000 + i);
        let proper = is_proper(&k, &e).unwrap().holds();
        let normal = is_normal(&k, &e).unwrap().holds();
        t.check(!proper || normal, || {
            format!("seed {i}: proper but not normal")
        });
        if is_adapted(&k, &e).unwrap().holds() {
            let je = enum_vertices(&je_hrep(&k, &e).unwrap()).unwrap();
            let js = enum_vertices(&jstar_hrep(&k).unwrap()).unwrap();
            t.check(je == js, || {
                format!("seed {i}: adapted but vertex sets differ")
            });
            t.check(k.compose(&k).unwrap().equals_kernel(&k), || {
                format!("seed {i}: adapted but ππ ≠ π")
            });
        }
    }
}

// ---------------------------------------------------------------- criterion 6

fn extreme_points(t: &mut Tally) {
    for i in 0..500 {
        let (k, e) = random_instance(60_000 + i);
        let vs = enum_vertices(&je_hrep(&k, &e).unwrap()).unwrap();
        t.check(extreme_members(&k, &e).unwrap() == vs, || {
            format!("seed {i}: extreme members differ")
        });
        for m in &vs {
            t.check(e.is_trivial(m).unwrap(), || {
                format!("seed {i}: vertex not trivial")
            });
            t.check(k.support().iter().any(|x| k.row(x) == m.masses()), || {
                format!("seed {i}: vertex is not a support row")
            });
        }
    }
}

// ---------------------------------------------------------------- criterion 7

fn structural_invariants(t: &mut Tally) {
    // Δ_μ has full mass exactly for trivial members
    let mut members = 0;
    let mut seed = 70_000u64;
    while members < 1000 {
        seed += 1;
        let (k, e) = random_instance(seed);
        let mut r = rng(seed ^ 0xface);
        let Some(mu) = random::member(&mut r, &k, &e) else {
            continue;
        };
        members += 1;
        let full = mu.of_set(&delta_set(&k, &mu).unwrap()).is_one();
        t.check(full == e.is_trivial(&mu).unwrap(), || {
            format!("Δ-mass of member, seed {seed}")
        });
    }
    // atom-indicator form of properness agrees with the definition
    for i in 0..1000 {
        let (k, e) = random_instance(71_000 + i);
        t.check(
            is_proper(&k, &e).unwrap().holds() == oracle::is_proper_def(&k, &e),
            || format!("properness forms, seed {i}"),
        );
    }
    // π is N_π-measurable and N_π ⊃ S_π
    for i in 0..1000 {
        let (k, _) = random_instance(72_000 + i);
        let npi = n_pi(&k);
        t.check(k.is_measurable(&npi), || {
            format!("N_pi measurability, seed {i}")
        });
        t.check(
            npi.compare(&sigma_pi(&k)).unwrap().at_least_as_fine(),
            || format!("N_pi contains S_pi, seed {i}"),
        );
    }
    // proper w.r.t. N_π iff support rows charge their Δ-classes fully
    for i in 0..1000 {
        let (k, _) = random_instance(73_000 + i);
        let npi = n_pi(&k);
        let lhs = is_proper(&k.regovern(&npi).unwrap(), &npi).unwrap().holds();
        let rhs = k
            .support()
            .iter()
            .all(|x| k.row_measure(x).of_set(&delta_class(&k, x)).is_one());
        t.check(lhs == rhs, || format!("Δ-class properness, seed {i}"));
    }
    // proper kernels: E and S_π have the same trace on the support
    for i in 0..1000 {
        let mut r = rng(74_000 + i);
        let n = r.gen_range(1..=MAX_N);
        let e = random::partition(&mut r, n);
        let k = if i % 2 == 0 {
            random::proper_kernel(&mut r, &e)
        } else {
            proper_refinement(&random::quasi_kernel(&mut r, &e), &e)
                .unwrap()
                .kernel
        };
        let s = k.support();
        t.check(e.trace(&s).blocks == sigma_pi(&k).trace(&s).blocks, || {
            format!("support trace, seed {i}")
        });
    }
}

// ---------------------------------------------------------------- criterion 8

fn compatible_families(t: &mut Tally) {
    for i in 0..200 {
        let mut r = rng(80_000 + i);
        let n = r.gen_range(1..=MAX_N);
        let len = r.gen_range(1..=4);
        let parts = random::decreasing_chain(&mut r, n, len);
        let mu = random::measure(&mut r, n);
        let chain = ChainSpec::new(parts, None, None).unwrap();
        let out = compatible_chain(&mu, &chain).unwrap();
        for c in &out.checks {
            t.check(c.holds, || format!("seed {i}: {}", c.label));
        }
    }
}

// ---------------------------------------------------------------- criterion 9

fn tail_representation(t: &mut Tally) {
    let f7 = fixture("F7_tower.json");
    let chain = f7.chain().unwrap();
    let mu = chain.reference().unwrap().clone();
    let kernels: Vec<Kernel> = chain
        .partitions()
        .iter()
        .map(|e| conditional_kernel(&mu, e).unwrap())
        .collect();
    let levels =
        ChainSpec::new(chain.partitions().to_vec(), Some(kernels), Some(mu.clone())).unwrap();
    match tail_pipeline(&levels.with_stationary_tail(1), 2) {
        Ok(out) => {
            let res = out.refinement.unwrap();
            t.check(res.kernel.rows() == &vec![v(&["1/4"; 4]); 4][..], || {
                "F7 result is not the uniform-row kernel".into()
            });
            let je = enum_vertices(&je_hrep(&res.kernel, &chain.meet_all()).unwrap()).unwrap();
            t.check(je.as_slice() == [mu.clone()], || {
                "F7 J_E(result) ≠ {uniform}".into()
            });
            t.check(res.normal && res.matches_intersection, || {
                "F7 certificate".into()
            });
        }
        Err(e) => t.check(false, || format!("F7 pipeline: {e}")),
    }
    for i in 0..100 {
        let mut r = rng(90_000 + i);
        let n = r.gen_range(1..=MAX_N);
        let len = r.gen_range(1..=4);
        let chain = random::kernel_chain(&mut r, n, len);
        match tail_pipeline(&chain.with_stationary_tail(1), 2) {
            Ok(out) => {
                let res = out.refinement.as_ref().unwrap();
                t.check(res.matches_intersection, || {
                    format!("seed {i}: vertex sets differ")
                });
                t.check(out.all_hold(), || format!("seed {i}: pipeline checks"));
            }
            Err(e) => t.check(false, || format!("seed {i}: {e}")),
        }
    }
}

// ---------------------------------------------------------------- criterion 10

fn oracle_equivalence(t: &mut Tally) {
    let mut names: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    t.check(names.len() == 8, || {
        format!("expected 8 fixtures, found {}", names.len())
    });
    for path in names {
        let label = path.display().to_string();
        match run(&Command::Oracle {
            model: Some(path),
            force: false,
            random: None,
            seed: 0,
            max_n: MAX_N,
        }) {
            Ok(r) => t.check(r.result["discrepancy_count"] == 0, || {
                format!("{label}: {}", r.result["discrepancies"])
            }),
            Err(e) => t.check(false, || format!("{label}: {e}")),
        }
    }
    match run(&Command::Oracle {
        model: None,
        force: false,
        random: Some(500),
        seed: 100_000,
        max_n: MAX_N,
    }) {
        Ok(r) => t.check(r.result["discrepancy_count"] == 0, || {
            format!("random models: {}", r.result["failing_models"])
        }),
        Err(e) => t.check(false, || format!("random models: {e}")),
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Tally)); 10] = [
        ("fixture regression F1-F8", fixture_regression),
        ("proper refinements are proper refinements (1000 kernels)", proper_refinements),
        ("normal refinements under J_E = J_* (500 kernels)", normal_refinements),
        ("five normality statements agree (1000 kernels)", normality_equivalence),
        ("proper => normal; adapted => J_E = J_* and idempotent (1000 kernels)", proper_normal_adapted),
        ("extreme members equal enumerated vertices (500 kernels)", extreme_points),
        ("Delta-mass, atom-form properness, N_pi, Delta-class properness, support trace (5 x 1000)", structural_invariants),
        ("compatible proper families on decreasing chains (200 chains)", compatible_families),
        ("tail-field representation: F7 and 100 random chains", tail_representation),
        ("oracle diff empty on fixtures and 500 random models; suite under 60 s", oracle_equivalence),
    ];
    let suite = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut tally = Tally::default();
        f(&mut tally);
        if i == criteria.len() - 1 {
            let total = suite.elapsed();
            tally.check(total < Duration::from_secs(60), || {
                format!("suite took {total:?}")
            });
        }
        let ok = tally.failures.is_empty();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {} {} ({} checks, {} violations, {:.2?})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            tally.checks,
            tally.failures.len(),
            start.elapsed()
        );
        for f in tally.failures.iter().take(5) {
            println!("    {f}");
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        suite.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
