//! Fit the three classifiers, save one to disk and reload it.

use gesture_core::classifiers::{load_model, save_model, ClassifierKind, ClassifierSpec, EtParams, Predictor};
use gesture_core::evaluation::plan_mixed;
use gesture_core::features::extract_all;
use gesture_core::synth::{generate, SynthSpec};

fn main() -> gesture_core::Result<()> {
    let matrix = extract_all(&generate(&SynthSpec::easy())?)?;
    let plan = plan_mixed(&matrix, 0.75, 1)?;
    let (x_train, y_train) = (matrix.select_rows(&plan.train), matrix.select_labels(&plan.train));
    let (x_test, y_test) = (matrix.select_rows(&plan.test), matrix.select_labels(&plan.test));

    for kind in ClassifierKind::ALL {
        let model = ClassifierSpec::default_for(kind, 42).fit(&x_train, &y_train)?;
        let predicted = model.predict_batch(&x_test)?;
        let hits = predicted.iter().zip(&y_test).filter(|(p, y)| p == y).count();
        println!("{}  test accuracy {:.2} %", kind.short_name(), 100.0 * hits as f64 / y_test.len() as f64);
    }

    // overriding hyperparameters
    let spec = ClassifierSpec::ExtraTrees(EtParams { n_trees: 20, k_features: 4, ..Default::default() });
    let model = spec.fit(&x_train, &y_train)?;

    let path = std::env::temp_dir().join("gesture-et-model.json");
    save_model(&model, &path)?;
    let back = load_model(&path)?;
    assert_eq!(back.predict_batch(&x_test)?, model.predict_batch(&x_test)?);
    println!("saved and reloaded {} ({} bytes)", path.display(), std::fs::metadata(&path).unwrap().len());
    Ok(())
}
