//! Per-sample classification time of the three classifiers with default
//! hyperparameters. Build with `--release`; absolute numbers are machine
//! specific, only their order is meaningful.

use gesture_core::classifiers::{ClassifierKind, ClassifierSpec};
use gesture_core::evaluation::{measure_classify_time, plan_mixed, TimingConfig};
use gesture_core::features::extract_all;
use gesture_core::synth::{generate, SynthSpec};

fn main() -> gesture_core::Result<()> {
    let matrix = extract_all(&generate(&SynthSpec::easy())?)?;
    let plan = plan_mixed(&matrix, 0.75, 0)?;
    let train = matrix.select_rows(&plan.train);
    let test = matrix.select_rows(&plan.test);
    let timing = TimingConfig { reps: 2000, groups: 7 };

    let mut times = Vec::new();
    for kind in ClassifierKind::ALL {
        let model = ClassifierSpec::default_for(kind, 0).fit(&train, &matrix.select_labels(&plan.train))?;
        let t = measure_classify_time(&model, &test, &timing)?;
        println!("{}  {:>10.3} µs/sample", kind.short_name(), t * 1e6);
        times.push(t);
    }
    let (et, gb, rc) = (times[0], times[1], times[2]);
    println!("RC < GB < ET: {}", rc < gb && gb < et);
    println!("ET / RC = {:.0}x", et / rc);
    Ok(())
}
