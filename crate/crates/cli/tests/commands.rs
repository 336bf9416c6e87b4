use std::path::Path;
use std::process::Command;

use freeprecode_cli::checkpoint::Checkpoint;
use freeprecode_cli::commands::{self, evaluate, sweep, train, Metric, Overrides};
use freeprecode_cli::config::{ExperimentConfig, SnrSpec};
use freeprecode_cli::output::{read_rows, EvalRow, SweepRow};
use freeprecode_core::evaluation::{genie_map_ber, mutual_information};
use freeprecode_core::prelude::*;

const BIN: &str = env!("CARGO_BIN_EXE_freeprecode");

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    let text = format!(
        "{extra}snr_db = 3.0\n[constellation]\nkind = \"psk\"\norder = 2\n[channel]\nname = \"H1\"\n"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn zero_iterations_write_initial_checkpoint_and_empty_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "outer_iters = 0\n");
    let out = dir.path().join("run");
    let ck_path = commands::cmd_train(&cfg, &out, &Overrides::default()).unwrap();
    let history = std::fs::read_to_string(out.join(commands::HISTORY_FILE)).unwrap();
    assert_eq!(history, "iteration,rx_loss,tx_loss,trace_power,val_loss,mi_probe\n");
    let ck = Checkpoint::load(&ck_path).unwrap();
    assert_eq!(ck.iteration, 0);
    assert_eq!(
        ck.precoders[0].g(),
        freeprecode_core::precoder::init_precoder(2, 0).unwrap().g()
    );
}

#[test]
fn training_twice_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "outer_iters = 15\nvalidate_every = 5\nprobe_noise = 100\nprobe_every = 5\n");
    let overrides = Overrides {
        seed: Some(17),
        ..Overrides::default()
    };
    let a = commands::cmd_train(&cfg, &dir.path().join("a"), &overrides).unwrap();
    let b = commands::cmd_train(&cfg, &dir.path().join("b"), &overrides).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let ha = std::fs::read_to_string(dir.path().join("a").join(commands::HISTORY_FILE)).unwrap();
    let hb = std::fs::read_to_string(dir.path().join("b").join(commands::HISTORY_FILE)).unwrap();
    assert_eq!(ha, hb);
    assert_eq!(ha.lines().count(), 16);
    let probes = ha.lines().skip(1).filter(|l| !l.ends_with(',')).count();
    assert_eq!(probes, 3);
    assert_eq!(Checkpoint::load(&a).unwrap().seed, 17);
}

fn identity_checkpoint() -> Checkpoint {
    let mut cfg = ExperimentConfig::example();
    cfg.outer_iters = 0;
    let (mut ck, _) = train(&cfg, 3.0).unwrap();
    ck.precoders = vec![PrecoderParams::identity(2)];
    ck
}

#[test]
fn identity_eval_matches_direct_calls() {
    let ck = identity_checkpoint();
    let grid = [0.0, 5.0];
    let metrics = [Metric::MiModelFree, Metric::MiNoPrecoder, Metric::BerMap];
    let rows = evaluate(&ck, &grid, &metrics, 2000, 11).unwrap();
    assert_eq!(rows.len(), grid.len() * metrics.len());
    let space = ck.config.space().unwrap();
    for (i, &snr) in grid.iter().enumerate() {
        let (_, ch) = make_channel(ck.config.channels().unwrap().remove(0), snr, 11).unwrap();
        let mi = mutual_information(&ch, &ComplexMatrix::identity(2), &space, 2000, 11).unwrap();
        let ber = genie_map_ber(&ch, &ComplexMatrix::identity(2), &space, 2000, 11).unwrap();
        let cell = &rows[i * 3..(i + 1) * 3];
        assert_eq!(cell[0].snr_db, snr);
        assert_eq!(cell[0].metric, "mi_model_free");
        assert_eq!(cell[0].value, mi.value_bits);
        assert_eq!(cell[1].value, mi.value_bits);
        assert_eq!(cell[2].value, ber.ber);
        assert_eq!(cell[2].count, 4000);
    }
}

#[test]
fn eval_command_writes_all_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let ck_path = dir.path().join("ck.txt");
    identity_checkpoint().save(&ck_path).unwrap();
    let out = dir.path().join("results.csv");
    commands::cmd_eval(&ck_path, &out, Some(&[1.0, 2.0]), &Metric::ALL, 200, 3).unwrap();
    let rows: Vec<EvalRow> = read_rows(&out).unwrap();
    assert_eq!(rows.len(), 10);
    let names: Vec<&str> = rows[..5].iter().map(|r| r.metric.as_str()).collect();
    assert_eq!(names, ["mi_model_free", "mi_no_precoder", "mi_diag_baseline", "ber_map", "ber_receiver"]);
    assert!(rows.iter().all(|r| r.value.is_finite()));
    let header = std::fs::read_to_string(&out).unwrap();
    assert!(header.starts_with("snr_db,metric,value,std_err,count\n"));
}

#[test]
fn single_point_sweep_matches_train_then_eval() {
    let mut cfg = ExperimentConfig::example();
    cfg.outer_iters = 10;
    cfg.snr_db = SnrSpec::Scalar(2.0);
    let rows = sweep(&cfg, 500).unwrap();
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, commands::SWEEP_METHODS);
    let (ck, _) = train(&cfg, 2.0).unwrap();
    let eval = evaluate(&ck, &[2.0], &[Metric::MiModelFree, Metric::MiNoPrecoder, Metric::MiDiagBaseline], 500, cfg.seed).unwrap();
    assert_eq!(rows[0].mi_bits, eval[0].value);
    assert_eq!(rows[3].mi_bits, eval[1].value);
    assert_eq!(rows[2].mi_bits, eval[2].value);
}

#[test]
fn pivot_sweep_trains_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "outer_iters = 5\nsweep = \"pivot\"\npivot_snr_db = 1.0\n");
    let out = dir.path().join("sweep.csv");
    let overrides = Overrides {
        snr_db: Some(vec![-2.0, 6.0]),
        ..Overrides::default()
    };
    commands::cmd_sweep(&cfg, &out, &overrides, 200).unwrap();
    let rows: Vec<SweepRow> = read_rows(&out).unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0].snr_db, -2.0);
    assert_eq!(rows[4].snr_db, 6.0);
    assert!(rows[4].mi_bits >= rows[0].mi_bits);
}

#[test]
fn mac_checkpoint_round_trips_and_evaluates() {
    let cfg = ExperimentConfig::parse(
        "mode = \"mac\"\nhead = \"sigmoid\"\nsnr_db = 5.0\nouter_iters = 6\n[constellation]\nkind = \"psk\"\norder = 2\n\
         [[mac.users]]\nname = \"identity\"\nsize = 1\n[[mac.users]]\nrows = 1\ncols = 1\nentries = [[0.4, -0.2]]\n",
    )
    .unwrap();
    let (ck, history) = train(&cfg, 5.0).unwrap();
    assert_eq!(history.len(), 6);
    let back = Checkpoint::from_text(&ck.to_text()).unwrap();
    assert_eq!(back.to_text(), ck.to_text());
    assert_eq!(back.precoders.len(), 2);
    let rows = evaluate(&back, &[5.0], &[Metric::MiModelFree, Metric::BerReceiver], 300, 1).unwrap();
    assert!(rows[0].value > 0.0 && rows[0].value <= 2.0);
    assert_eq!(rows[1].count, 600);
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn binary_end_to_end_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "outer_iters = 3\n");
    let run_dir = dir.path().join("run");
    let (code, _, err) = run(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
        "--snr-db",
        "-1",
        "--mode",
        "model_aware",
    ]);
    assert_eq!(code, 0, "{err}");
    let ck = run_dir.join("checkpoint.txt");
    let (code, stdout, _) = run(&["inspect-checkpoint", ck.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("model_aware") && stdout.contains("[-1.0]"), "{stdout}");

    let results = dir.path().join("r.csv");
    let (code, _, err) = run(&[
        "eval",
        ck.to_str().unwrap(),
        "--out",
        results.to_str().unwrap(),
        "--snr-db",
        "-3,0",
        "--metrics",
        "mi_model_free,ber_map",
        "--samples",
        "200",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(read_rows::<EvalRow>(&results).unwrap().len(), 4);

    // config error
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "snr_db = 3.0\nbatch = \"many\"\n").unwrap();
    let (code, _, err) = run(&["train", "--config", bad.to_str().unwrap(), "--out", run_dir.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    // missing file
    let (code, _, _) = run(&["inspect-checkpoint", dir.path().join("none").to_str().unwrap()]);
    assert_eq!(code, 3);
    // unknown checkpoint version
    let text = std::fs::read_to_string(&ck).unwrap().replacen("version 1", "version 7", 1);
    let future = dir.path().join("future.txt");
    std::fs::write(&future, text).unwrap();
    let (code, _, err) = run(&["inspect-checkpoint", future.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("version 7"), "{err}");
    // unknown metric
    let (code, _, _) = run(&["eval", ck.to_str().unwrap(), "--out", results.to_str().unwrap(), "--metrics", "nope"]);
    assert_eq!(code, 2);
}
