use std::process::{Command, Output};

fn qcoh_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcoh"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("QCOH_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("qcoh binary runs")
}

fn qcoh(args: &[&str]) -> Output {
    qcoh_env(args, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn state_examples() {
    let o = qcoh(&["state"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "c1,c2,c3,lambda1,lambda2,lambda3,lambda4,l1,re\n\
         0.100000000000,0.400000000000,0.500000000000,0,0.250000000000,0.300000000000,0.450000000000,0.400000000000,0.271787054159\n"
    );
    let o = qcoh(&["state", "--c1", "0", "--c2", "0", "--c3", "0"]);
    assert!(stdout(&o)
        .ends_with("0,0,0,0.250000000000,0.250000000000,0.250000000000,0.250000000000,0,0\n"));

    let o = qcoh(&["state", "--c1", "1", "--c2", "1", "--c3", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("1/4(1-c1-c2-c3) = -0.5"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn power_examples() {
    let o = qcoh(&[
        "power",
        "--channel",
        "ad",
        "--kind",
        "decohering",
        "--measure",
        "l1",
        "--p",
        "1",
        "--mu",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("channel,power,measure,p,mu,value,basis,alpha,beta,theta,phi,evaluations")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        &row[..7],
        [
            "ad",
            "decohering",
            "l1",
            "1.00000000000",
            "0",
            "3.00000000000",
            ""
        ]
    );

    let o = qcoh(&[
        "power",
        "--channel",
        "pd",
        "--kind",
        "decohering",
        "--measure",
        "l1",
        "--p",
        "0.5",
        "--mu",
        "0",
    ]);
    assert!(stdout(&o).contains(",1.75000000000,"));

    for channel in ["ad", "pd", "dep"] {
        for extra in [&[][..], &["--bell-basis"][..]] {
            let mut args = vec![
                "power",
                "--channel",
                channel,
                "--kind",
                "cohering",
                "--p",
                "0.4",
                "--mu",
                "0.3",
            ];
            args.extend_from_slice(extra);
            let o = qcoh(&args);
            assert_eq!(o.status.code(), Some(0));
            for line in stdout(&o).lines().skip(1) {
                let value: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
                // damping moves |00> population asymmetrically, creating Φ+/Φ- coherence
                if channel == "ad" && !extra.is_empty() {
                    assert!(value > 0.1, "{line}");
                } else {
                    assert!(value.abs() <= 1e-12, "{line}");
                }
            }
        }
    }
}

#[test]
fn power_usage_errors() {
    let cases: &[&[&str]] = &[
        &[
            "power",
            "--channel",
            "ad",
            "--kind",
            "decohering",
            "--p",
            "0.5",
        ],
        &[
            "power",
            "--channel",
            "ad",
            "--kind",
            "sideways",
            "--p",
            "0.5",
            "--mu",
            "0",
        ],
        &[
            "power",
            "--channel",
            "ad",
            "--kind",
            "decohering",
            "--p",
            "1.5",
            "--mu",
            "0",
        ],
        &[
            "power",
            "--channel",
            "ad",
            "--kind",
            "decohering",
            "--bell-basis",
            "--p",
            "0.5",
            "--mu",
            "0",
        ],
    ];
    for args in cases {
        assert_eq!(qcoh(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_rows_are_ordered_and_anchored() {
    let o = qcoh(&[
        "sweep",
        "--channel",
        "ad",
        "--mu-list",
        "1,0,0.5",
        "--p-count",
        "101",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("channel,measure,c1,c2,c3,mu,p,value"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 3 * 101 * 2);
    // (mu, p, measure) ordering
    let keys: Vec<(f64, f64, String)> = rows
        .iter()
        .map(|r| (r[5].parse().unwrap(), r[6].parse().unwrap(), r[1].clone()))
        .collect();
    assert!(keys
        .windows(2)
        .all(|w| (w[0].0, w[0].1, &w[0].2) < (w[1].0, w[1].1, &w[1].2)));
    for r in rows.iter().filter(|r| r[6] == "0" && r[1] == "l1") {
        assert_eq!(r[7], "0.400000000000");
    }
}

#[test]
fn pd_full_memory_is_flat_and_dep_dips() {
    let o = qcoh(&["sweep", "--channel", "pd", "--mu-list", "1"]);
    let values: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[7].to_string())
        })
        .collect();
    for m in ["l1", "re"] {
        let mut vs = values.iter().filter(|v| v.0 == m).map(|v| &v.1);
        let first = vs.next().unwrap();
        assert!(vs.all(|v| v == first), "{m} not frozen");
    }

    let o = qcoh(&[
        "sweep",
        "--channel",
        "dep",
        "--mu-list",
        "0",
        "--measure",
        "l1",
    ]);
    let rows: Vec<(f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[6].parse().unwrap(), f[7].parse().unwrap())
        })
        .collect();
    let min = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(min.0, 0.75);
    assert!(min.1 <= 1e-9);
}

#[test]
fn time_mode_maps_through_decay() {
    let o = qcoh(&[
        "sweep",
        "--channel",
        "ad",
        "--measure",
        "l1",
        "--mu-list",
        "0",
        "--gamma",
        "2",
        "--t-grid",
        "0,1,3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let ps: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    let expected = [0.0, 1.0 - (-1.0f64).exp(), 1.0 - (-2.0f64).exp()];
    for (p, e) in ps.iter().zip(expected) {
        assert!((p - e).abs() < 1e-11);
    }

    assert_eq!(
        qcoh(&["sweep", "--channel", "ad", "--gamma", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcoh(&[
            "sweep",
            "--channel",
            "ad",
            "--gamma",
            "1",
            "--t-grid",
            "0,1,5",
            "--p-count",
            "5"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        qcoh(&[
            "sweep",
            "--channel",
            "ad",
            "--gamma",
            "-1",
            "--t-grid",
            "0,1,5"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn sweep_usage_and_io_errors() {
    let usage: &[&[&str]] = &[
        &["sweep"],
        &["sweep", "--channel", "xx"],
        &["sweep", "--channel", "ad", "--measure", "l2"],
        &["sweep", "--channel", "ad", "--p-count", "1"],
        &["sweep", "--channel", "ad", "--p-count", "10002"],
        &["sweep", "--channel", "ad", "--p-stop", "1.2"],
        &["sweep", "--channel", "ad", "--mu-list", "0,1.5"],
        &["sweep", "--channel", "ad", "--mu-list", "a"],
        &[
            "sweep",
            "--channel",
            "ad",
            "--c1",
            "1",
            "--c2",
            "1",
            "--c3",
            "1",
        ],
        &["sweep", "--channel", "ad", "--no-such-flag"],
        &["launch"],
    ];
    for args in usage {
        assert_eq!(qcoh(args).status.code(), Some(2), "{args:?}");
    }
    let o = qcoh(&[
        "sweep",
        "--channel",
        "ad",
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn settings_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qcoh.conf");
    std::fs::write(
        &cfg,
        "# sweep defaults\nchannel = pd\nmeasure = re\nmu_list = 0.5\np-count = 3\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let rows = |o: &Output| -> Vec<Vec<String>> {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(String::from).collect())
            .collect()
    };

    // file only
    let r = rows(&qcoh(&["sweep", "--config", cfg]));
    assert_eq!(r.len(), 3);
    assert!(r
        .iter()
        .all(|f| f[0] == "pd" && f[1] == "re" && f[5] == "0.500000000000"));

    // env beats file
    let r = rows(&qcoh_env(
        &["sweep", "--config", cfg],
        &[("QCOH_CHANNEL", "dep"), ("QCOH_P_COUNT", "4")],
    ));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|f| f[0] == "dep"));

    // flag beats env
    let r = rows(&qcoh_env(
        &["sweep", "--config", cfg, "--channel", "ad"],
        &[("QCOH_CHANNEL", "dep")],
    ));
    assert!(r.iter().all(|f| f[0] == "ad" && f[1] == "re"));

    // config path from the environment
    let r = rows(&qcoh_env(&["sweep"], &[("QCOH_CONFIG", cfg)]));
    assert!(r.iter().all(|f| f[0] == "pd"));
}

#[test]
fn unknown_settings_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "channel = ad\ncolour = blue\n").unwrap();
    let o = qcoh(&["state", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));

    let o = qcoh_env(&["state"], &[("QCOH_VERBOSITY", "3")]);
    assert_eq!(o.status.code(), Some(2));

    let o = qcoh_env(&["state"], &[("QCOH_C1", "lots")]);
    assert_eq!(o.status.code(), Some(2));

    let o = qcoh(&["state", "--config", "/nonexistent/qcoh.conf"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_output_routing_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");

    let o = qcoh(&[
        "verify",
        "--channel",
        "dep",
        "--grid",
        "6",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("formula verification on 6x6 grid"));
    let written = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(written.lines().count(), 1 + 5);
    assert!(written.starts_with("formula,equation,channel,"));

    let o = qcoh(&["verify", "--channel", "dep", "--grid", "6"]);
    assert_eq!(stdout(&o), written);
    assert!(stderr(&o).starts_with("formula verification"));

    // Eq19 mismatches under the literal convention, outside the documented set
    let o = qcoh(&[
        "verify",
        "--channel",
        "pd",
        "--grid",
        "6",
        "--literal-text-probs",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("PD_COEFFS,Eq19,") && l.ends_with(",MISMATCH")));
    let o = qcoh_env(
        &[
            "verify",
            "--channel",
            "pd",
            "--grid",
            "6",
            "--literal-text-probs",
        ],
        &[("QCOH_STRICT", "1")],
    );
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(qcoh(&["verify", "--grid", "1"]).status.code(), Some(2));
    assert_eq!(
        qcoh(&["verify", "--channel", "everything"]).status.code(),
        Some(2)
    );
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qcoh(&["--help"]).status.code(), Some(0));
    assert_eq!(qcoh(&["--version"]).status.code(), Some(0));
    assert_eq!(qcoh(&["sweep", "--help"]).status.code(), Some(0));
}

#[test]
fn power_grid_matches_dephasing_oracle() {
    let o = qcoh(&[
        "power",
        "--channel",
        "pd",
        "--kind",
        "decohering",
        "--measure",
        "l1",
        "--mu-list",
        "1,0,0.5",
        "--p-count",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(f64, f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[4].parse().unwrap(),
                f[3].parse().unwrap(),
                f[5].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 15);
    assert!(rows.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
    for (mu, p, v) in rows {
        assert!((v - ((1.0 - mu) * p * (4.0 - p) + 2.0 * p * mu)).abs() < 1e-9);
    }
    let both = qcoh(&[
        "power",
        "--channel",
        "pd",
        "--kind",
        "decohering",
        "--p",
        "0.2",
        "--p-count",
        "3",
        "--mu",
        "0",
    ]);
    assert_eq!(both.status.code(), Some(2));
}
