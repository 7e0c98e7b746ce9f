use std::io::Cursor;

use tucker_rtr::solver::{ModelKind, ModelContext};
use tucker_rtr::tensor::DEFAULT_RANK_TOL;
use tucker_rtr::{DenseTensor, SampledTensor, SolverConfig, TuckerTensor};
use tucker_rtr_cli::experiments::{
    ingest_and_report, loglinear_r2, run_convergence, run_model_order, stationary_residual, superlinear_tail,
    ModelOrderConfig, Scenario, SolverKind,
};
use tucker_rtr_cli::{
    generate_problem, held_out_split, read_tensor_file, read_trace, write_tensor_file, write_trace, CliError,
    ProblemSpec, Sampling, TraceRow, TruthKind,
};

fn write_to_string(data: &SampledTensor) -> String {
    let mut buf = Vec::new();
    write_tensor_file(&mut buf, data).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn full_fraction_samples_every_entry() {
    let p = generate_problem(&ProblemSpec::new(&[3, 4, 2], &[2, 2, 2], 1.0, TruthKind::LowRank, 1)).unwrap();
    assert_eq!(p.data.len(), 24);
    assert_eq!(p.data.to_dense(), p.truth);
}

#[test]
fn low_rank_truth_has_requested_rank() {
    for (ranks, seed) in [([2, 3, 2], 2), ([1, 2, 2], 3), ([3, 3, 3], 4)] {
        let p = generate_problem(&ProblemSpec::new(&[6, 7, 5], &ranks, 0.3, TruthKind::LowRank, seed)).unwrap();
        assert_eq!(p.truth.multilinear_rank(DEFAULT_RANK_TOL).unwrap(), ranks.to_vec());
        assert_eq!(p.data.len(), 63);
        assert_eq!(p.x0.ranks(), &ranks);
    }
    let full = generate_problem(&ProblemSpec::new(&[4, 5, 3], &[2, 2, 2], 0.5, TruthKind::FullRank, 5)).unwrap();
    assert_eq!(full.truth.multilinear_rank(DEFAULT_RANK_TOL).unwrap(), vec![4, 5, 3]);
}

#[test]
fn noise_perturbs_the_low_rank_truth() {
    let spec = |truth| ProblemSpec::new(&[5, 5, 5], &[2, 2, 2], 0.4, truth, 6);
    let clean = generate_problem(&spec(TruthKind::LowRank)).unwrap();
    let noisy = generate_problem(&spec(TruthKind::LowRankPlusNoise(0.01))).unwrap();
    assert!(clean.data.same_support(&noisy.data));
    let diff = noisy.truth.sub(&clean.truth).unwrap();
    let rms = diff.norm() / (125f64).sqrt();
    assert!(rms > 0.007 && rms < 0.013, "{rms}");
    assert_eq!(noisy.data.gather(&noisy.truth).unwrap(), noisy.data.values());
}

#[test]
fn generation_is_deterministic() {
    let spec = ProblemSpec::new(&[6, 6, 6], &[2, 2, 2], 0.2, TruthKind::LowRankPlusNoise(0.1), 7);
    let a = generate_problem(&spec).unwrap();
    let b = generate_problem(&spec).unwrap();
    assert_eq!(write_to_string(&a.data), write_to_string(&b.data));
    assert_eq!(a.x0.tucker().to_full(), b.x0.tucker().to_full());
    let other = generate_problem(&ProblemSpec { seed: 8, ..spec }).unwrap();
    assert_ne!(write_to_string(&a.data), write_to_string(&other.data));
}

#[test]
fn generation_rejects_bad_specs() {
    let bad = |spec: ProblemSpec| matches!(generate_problem(&spec), Err(CliError::Usage(_)));
    assert!(bad(ProblemSpec::new(&[4, 4], &[1, 1], 0.01, TruthKind::LowRank, 0)));
    assert!(bad(ProblemSpec::new(&[4, 4], &[1, 1], 0.0, TruthKind::LowRank, 0)));
    assert!(bad(ProblemSpec::new(&[4, 4], &[1, 1], 1.5, TruthKind::LowRank, 0)));
    assert!(bad(ProblemSpec::new(&[4, 4], &[1, 1, 1], 0.5, TruthKind::LowRank, 0)));
    assert!(bad(ProblemSpec::new(&[4, 4], &[1, 1], 0.5, TruthKind::LowRankPlusNoise(-1.0), 0)));
    assert!(bad(ProblemSpec::new(&[4, 4, 4], &[4, 1, 1], 0.5, TruthKind::LowRank, 0)));
}

#[test]
fn explicit_sampling_set_is_used() {
    let omega = vec![vec![0, 1, 2], vec![3, 0, 0], vec![1, 1, 1]];
    let spec = ProblemSpec {
        sampling: Sampling::Indices(omega.clone()),
        ..ProblemSpec::new(&[4, 3, 3], &[2, 2, 2], 1.0, TruthKind::LowRank, 9)
    };
    let p = generate_problem(&spec).unwrap();
    let mut sorted = omega;
    sorted.sort();
    let got: Vec<Vec<usize>> = (0..p.data.len()).map(|k| p.data.index(k).to_vec()).collect();
    assert_eq!(got, sorted);
}

#[test]
fn tensor_file_round_trip() {
    let p = generate_problem(&ProblemSpec::new(&[5, 4, 3, 2], &[2, 2, 2, 2], 0.4, TruthKind::FullRank, 10)).unwrap();
    let text = write_to_string(&p.data);
    assert!(text.starts_with("4 5 4 3 2\n"));
    let back = read_tensor_file(Cursor::new(text)).unwrap();
    assert_eq!(back, p.data);
}

#[test]
fn tensor_file_grammar() {
    let text = "# survey\n\n3 2 2 2   # header\n2 2 1 1.5\n1 1 1 -2e-3 # trailing\n";
    let s = read_tensor_file(Cursor::new(text)).unwrap();
    assert_eq!(s.dims(), &[2, 2, 2]);
    assert_eq!(s.index(0), &[0, 0, 0]);
    assert_eq!(s.values(), &[-2e-3, 1.5]);

    let err = |text: &str| match read_tensor_file(Cursor::new(text.to_string())) {
        Err(CliError::Data(msg)) => msg,
        other => panic!("expected a data error, got {other:?}"),
    };
    assert!(err("3 2 2 2\n1 1 1 1\n2 2 2\n").starts_with("line 3"));
    assert!(err("3 2 2 2\n1 1 3 1\n").starts_with("line 2"));
    assert!(err("3 2 2 2\n0 1 1 1\n").starts_with("line 2"));
    assert!(err("3 2 2 2\n1 1 1 x\n").starts_with("line 2"));
    assert!(err("3 2 2 2\n1 1 1 NaN\n").starts_with("line 2"));
    assert!(err("# c\n3 2 2 2\n1 1 1 1\n2 2 2 2\n1 1 1 3\n").starts_with("line 5: duplicate"));
    assert!(err("3 2 2\n").starts_with("line 1"));
    assert!(err("1 4\n1 1\n").starts_with("line 1"));
    assert!(err("3 2 2 2\n").contains("no entries"));
    assert!(err("# nothing\n").contains("header"));
}

#[test]
fn trace_csv_round_trip() {
    let p = generate_problem(&ProblemSpec::new(&[6, 6, 6], &[2, 2, 2], 0.6, TruthKind::LowRank, 11)).unwrap();
    let runs = run_convergence(&p, &[2, 2, 2], &[SolverKind::ALL[0], SolverKind::NonlinearCg], &SolverConfig::default());
    for run in runs {
        let trace = run.outcome.unwrap().trace;
        let rows = TraceRow::from_trace(&trace, true);
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,f,grad_rel,delta,rho,accepted,inner_iters,wall_ms\n"));
        assert_eq!(read_trace(Cursor::new(text)).unwrap(), rows);
        assert!(TraceRow::from_trace(&trace, false).iter().all(|r| r.wall_ms == 0.0));
    }
    assert!(read_trace(Cursor::new("iter,f\n0,1\n")).is_err());
}

#[test]
fn held_out_split_partitions_samples() {
    let p = generate_problem(&ProblemSpec::new(&[5, 5, 5], &[2, 2, 2], 0.5, TruthKind::LowRank, 12)).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let (train, test) = held_out_split(&p.data, 0.5, &mut rng).unwrap();
    assert_eq!(train.len() + test.len(), p.data.len());
    assert_eq!(test.len(), 32);
    let mut all: Vec<(Vec<usize>, f64)> = train.iter().chain(test.iter()).map(|(i, v)| (i.to_vec(), v)).collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    let orig: Vec<(Vec<usize>, f64)> = p.data.iter().map(|(i, v)| (i.to_vec(), v)).collect();
    assert_eq!(all, orig);
}

#[test]
fn rank_221_spectrum_has_one_dominant_value_in_mode_three() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(13);
    let t = TuckerTensor::random(&[6, 5, 4], &[2, 2, 1], &mut rng).unwrap().to_full();
    let all: Vec<Vec<usize>> = (0..t.len()).map(|l| tucker_rtr_cli::problem::unravel(t.dims(), l)).collect();
    let data = tucker_rtr::sample_project(&t, &all).unwrap();
    let report = ingest_and_report(&data, None, 0.5, &SolverConfig::default(), 0).unwrap();
    let spectra = report.spectra.unwrap();
    let s3 = &spectra[2];
    assert!(s3[0] > 0.0);
    assert!(s3[1..].iter().all(|&v| v <= 1e-12 * s3[0]));
    assert!(spectra[0][1] > 1e-6 * spectra[0][0]);
    assert!(report.completion.is_none());
}

#[test]
fn held_out_error_vanishes_on_low_rank_data() {
    let p = generate_problem(&ProblemSpec::new(&[10, 10, 10], &[2, 2, 2], 0.5, TruthKind::LowRank, 14)).unwrap();
    let report = ingest_and_report(&p.data, Some(&[2, 2, 2]), 0.5, &SolverConfig::default(), 3).unwrap();
    assert!(report.spectra.is_none());
    let c = report.completion.unwrap();
    assert_eq!(c.held_out, 250);
    assert!(c.rel_error <= 1e-6, "{}", c.rel_error);
}

#[test]
fn manufactured_residual_is_stationary() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(15);
    let p = generate_problem(&ProblemSpec::new(&[6, 6, 6], &[2, 2, 2], 0.6, TruthKind::LowRank, 15)).unwrap();
    let x = p.x0.clone();
    let x_omega = p.data.with_values(p.data.gather(&x.tucker().to_full()).unwrap()).unwrap();
    let e = stationary_residual(&x, &x_omega, 2.0, &mut rng).unwrap();
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 2.0).abs() <= 1e-12);
    let vals = x_omega.values().iter().zip(&e).map(|(a, b)| a - b).collect();
    let ctx = ModelContext::new(&x, &x_omega.with_values(vals).unwrap()).unwrap();
    assert!(ctx.gradient().norm() <= 1e-12);
    assert!((ctx.value() - 2.0).abs() <= 1e-12);

    // fewer samples than parameters: only the zero residual is stationary
    let few = SampledTensor::from_entries(vec![6, 6, 6], vec![(vec![0, 0, 0], 1.0), (vec![1, 2, 3], 1.0)]).unwrap();
    assert!(stationary_residual(&x, &few, 1.0, &mut rng).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn model_order_small_run() {
    let cfg = ModelOrderConfig {
        dims: vec![10, 10, 10],
        ranks: vec![3, 3, 3],
        sample_sizes: vec![1000],
        trials: 20,
        j_max: 8,
        seed: 3,
        ..ModelOrderConfig::default()
    };
    let cases = run_model_order(&cfg).unwrap();
    assert_eq!(cases.len(), 3);
    for c in &cases {
        assert_eq!(c.ratios.len(), 3);
        assert!(c.ratios.iter().all(|r| r.by_j.len() == 8));
        let (lo, hi) = c.model(ModelKind::SteepestDescent).range(3..=6);
        assert!(lo >= 0.2 && hi <= 0.32, "{} SD {lo} {hi}", c.scenario);
        assert!(c.model(ModelKind::Newton).range(3..=6).1 <= 0.15);
        if c.scenario != Scenario::Generic {
            assert!(c.grad_norm <= 1e-10);
        }
    }
    let zero = cases.iter().find(|c| c.scenario == Scenario::StationaryLowRank).unwrap();
    assert_eq!(zero.cost, 0.0);
    assert!(zero.model(ModelKind::GaussNewton).range(3..=6).1 <= 0.15);
    assert!(run_model_order(&ModelOrderConfig { trials: 0, ..cfg.clone() }).is_err());
    assert!(run_model_order(&ModelOrderConfig { sample_sizes: vec![1001], ..cfg }).is_err());
}

#[test]
fn convergence_runs_share_the_instance() {
    let p = generate_problem(&ProblemSpec::new(&[20, 20, 20], &[2, 2, 2], 0.5, TruthKind::LowRank, 16)).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.stopping.grad_rel_tol = 1e-10;
    let runs = run_convergence(&p, &[2, 2, 2], &SolverKind::ALL, &cfg);
    assert_eq!(runs.len(), 5);
    let f0 = runs[0].outcome.as_ref().unwrap().trace.records[0].f;
    for run in &runs {
        let trace = &run.outcome.as_ref().unwrap().trace;
        assert_eq!(trace.records[0].f, f0, "{}", run.kind);
        assert!(trace.iterations_to(1e-10).is_some(), "{}", run.kind);
        let fs: Vec<f64> = trace.records.windows(2).filter(|w| w[0].accepted).map(|w| w[1].f - w[0].f).collect();
        assert!(fs.iter().all(|&d| d <= 0.0), "{}", run.kind);
    }
    let exact = &runs[0].outcome.as_ref().unwrap().trace;
    assert!(superlinear_tail(exact, 1e-10));
    let r2 = loglinear_r2(&runs[3].outcome.as_ref().unwrap().trace, 1e-10);
    assert!(r2 > 0.0 && r2 <= 1.0);
}

#[test]
fn solver_kind_labels_parse() {
    for k in SolverKind::ALL {
        assert_eq!(k.label().parse::<SolverKind>().unwrap(), k);
    }
    assert!("newton".parse::<SolverKind>().is_err());
}

#[test]
fn dense_truth_matches_samples_for_full_rank_kind() {
    let p = generate_problem(&ProblemSpec::new(&[3, 3, 3], &[1, 1, 1], 0.5, TruthKind::FullRank, 17)).unwrap();
    let dense: DenseTensor = p.truth.clone();
    assert_eq!(p.data.gather(&dense).unwrap(), p.data.values());
    assert!(dense.data().iter().all(|&v| (0.0..1.0).contains(&v)));
}
