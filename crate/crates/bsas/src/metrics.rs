use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[truth][predicted]`
    pub confusion: Vec<Vec<usize>>,
}

pub fn confusion_matrix(truth: &[usize], pred: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        m[t][p] += 1;
    }
    m
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Scores predictions. Undefined precision, recall or F1 counts as 0, and
/// the macro average runs over all `n_classes`.
pub fn evaluate(truth: &[usize], pred: &[usize], n_classes: usize) -> Evaluation {
    let confusion = confusion_matrix(truth, pred, n_classes);
    let per_class: Vec<ClassMetrics> = (0..n_classes)
        .map(|k| {
            let tp = confusion[k][k];
            let support: usize = confusion[k].iter().sum();
            let predicted: usize = confusion.iter().map(|r| r[k]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
            ClassMetrics { precision, recall, f1, support }
        })
        .collect();
    let correct: usize = (0..n_classes).map(|k| confusion[k][k]).sum();
    Evaluation {
        accuracy: ratio(correct, truth.len()),
        macro_f1: per_class.iter().map(|c| c.f1).sum::<f64>() / n_classes.max(1) as f64,
        per_class,
        confusion,
    }
}

pub fn macro_f1(truth: &[usize], pred: &[usize], n_classes: usize) -> f64 {
    evaluate(truth, pred, n_classes).macro_f1
}
