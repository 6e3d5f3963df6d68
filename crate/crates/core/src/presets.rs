//! Named hyperparameter bundles taken from published tuning tables.

use crate::hyper::HyperParams;
use crate::lookahead::EtaSchedule;
use crate::optim::OptimizerKind;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: OptimizerKind,
    pub hp: HyperParams,
    pub note: &'static str,
}

/// Image-classification settings: decoupled weight decay 1e-4, adaptive
/// rules with beta1 0.9, beta2 0.999, eps 1e-9, lookahead k = 6.
fn cifar(alpha: f64) -> HyperParams {
    HyperParams {
        alpha,
        beta: 0.9,
        beta1: 0.9,
        beta2: 0.999,
        epsilon: 1e-9,
        k: 6,
        eta_schedule: EtaSchedule::Dyn08,
        weight_decay: 1e-4,
        ..HyperParams::default()
    }
}

fn admetas(name: &'static str, alpha: f64, beta: f64, note: &'static str) -> Preset {
    Preset { name, kind: OptimizerKind::AdmetaS, hp: HyperParams { beta, lambda: 0.9, ..cifar(alpha) }, note }
}

fn admetar(name: &'static str, alpha: f64, lambda: f64, note: &'static str) -> Preset {
    Preset { name, kind: OptimizerKind::AdmetaR, hp: HyperParams { lambda, ..cifar(alpha) }, note }
}

/// Fine-tuning settings: eps 1e-8, no weight decay.
fn finetune(name: &'static str, alpha: f64, lambda: f64, note: &'static str) -> Preset {
    Preset {
        name,
        kind: OptimizerKind::AdmetaR,
        hp: HyperParams { lambda, epsilon: 1e-8, weight_decay: 0.0, ..cifar(alpha) },
        note,
    }
}

fn baseline(name: &'static str, kind: OptimizerKind, alpha: f64) -> Preset {
    Preset { name, kind, hp: cifar(alpha), note: "CIFAR-10 / ResNet-110 baseline" }
}

pub fn presets() -> Vec<Preset> {
    vec![
        admetas("admetas-cifar10-resnet", 0.05, 0.2, "CIFAR-10 / ResNet-110"),
        admetas("admetas-cifar100-resnet", 0.05, 0.1, "CIFAR-100 / ResNet-110"),
        admetas("admetas-cifar10-pyramidnet", 0.05, 0.4, "CIFAR-10 / PyramidNet"),
        admetas("admetas-cifar100-pyramidnet", 0.05, 0.1, "CIFAR-100 / PyramidNet"),
        admetar("admetar-cifar10-resnet", 0.05, 0.1, "CIFAR-10 / ResNet-110"),
        admetar("admetar-cifar100-resnet", 0.05, 0.05, "CIFAR-100 / ResNet-110"),
        admetar("admetar-cifar10-pyramidnet", 0.01, 0.1, "CIFAR-10 / PyramidNet"),
        admetar("admetar-cifar100-pyramidnet", 0.01, 0.1, "CIFAR-100 / PyramidNet"),
        finetune("admetar-bert-base-mnli", 1.5e-4, 0.08, "BERT-base / MNLI"),
        finetune("admetar-bert-base-rte", 1.8e-3, 0.36, "BERT-base / RTE"),
        finetune("admetar-bert-base-squad1", 4e-4, 0.05, "BERT-base / SQuAD v1.1"),
        finetune("admetar-wav2vec-superb", 5e-4, 0.05, "Wav2vec 2.0 base / SUPERB"),
        finetune("admetar-wav2vec-commonlang", 2e-3, 0.2, "Wav2vec 2.0 base / Common Language"),
        baseline("sgd-cifar10-resnet", OptimizerKind::Sgd, 0.1),
        baseline("sgdm-cifar10-resnet", OptimizerKind::Sgdm, 0.1),
        baseline("adam-cifar10-resnet", OptimizerKind::Adam, 0.001),
        baseline("radam-cifar10-resnet", OptimizerKind::Radam, 0.01),
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
