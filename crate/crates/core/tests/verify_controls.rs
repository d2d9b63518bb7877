use fading_order::verify::{run_suite, SuiteOptions};

// Each positive check runs at the 1% level, so an occasional false rejection
// across 20 seeds is expected; negative controls must be rejected every time.
#[test]
fn controls_separate_across_seeds() {
    let mut clean_seeds = 0;
    for master_seed in 0..20 {
        let opts = SuiteOptions {
            master_seed,
            samples: 20_000,
            include_negative_controls: true,
        };
        let reports = run_suite(&opts).unwrap();
        for r in reports.iter().filter(|r| r.negative_control) {
            assert!(!r.pass, "seed {master_seed}: control {} passed", r.name);
        }
        clean_seeds += usize::from(reports.iter().filter(|r| !r.negative_control).all(|r| r.pass));
    }
    assert!(clean_seeds >= 16, "only {clean_seeds}/20 seeds passed every positive check");
}

#[test]
fn suite_is_deterministic() {
    let opts = SuiteOptions {
        master_seed: 42,
        samples: 10_000,
        include_negative_controls: false,
    };
    let a: Vec<f64> = run_suite(&opts).unwrap().iter().map(|r| r.statistic).collect();
    let b: Vec<f64> = run_suite(&opts).unwrap().iter().map(|r| r.statistic).collect();
    assert_eq!(a, b);
}
