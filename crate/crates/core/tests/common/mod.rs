//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use partialvar::design::{build_system, Regressor, SystemSpec};
use partialvar::estimation::{companion_from_lags, estimate_system, SurOptions, SystemEstimate};
use partialvar::linalg::eigen_moduli;
use partialvar::synthetic::{DgpSpec, SimulatedVar};
use partialvar::Role;
use rand::Rng;

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `A A' + 0.1 I` for a standard-normal-ish `A`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
    &a * a.transpose() + DMatrix::identity(n, n) * 0.1
}

/// Random lower-triangular matrix with a positive diagonal.
pub fn random_lower<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => 0.0,
        std::cmp::Ordering::Equal => rng.random_range(0.2..2.0),
        std::cmp::Ordering::Greater => rng.random_range(-1.0..1.0),
    })
}

/// Random lag matrices rescaled so the companion spectral radius is `radius`.
pub fn random_stable_lags<R: Rng>(rng: &mut R, n: usize, p: usize, radius: f64) -> Vec<DMatrix<f64>> {
    let lags: Vec<DMatrix<f64>> = (0..p).map(|_| DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.6..0.6))).collect();
    rescale_to_radius(lags, radius)
}

/// Scales `A_j` by `s^j` so the companion spectral radius becomes `radius`.
pub fn rescale_to_radius(mut lags: Vec<DMatrix<f64>>, radius: f64) -> Vec<DMatrix<f64>> {
    let current = eigen_moduli(&companion_from_lags(&lags)).unwrap()[0];
    let s = radius / current;
    for (j, a) in lags.iter_mut().enumerate() {
        *a *= s.powi(j as i32 + 1);
    }
    lags
}

pub fn estimate_simulated(sim: &SimulatedVar, p: usize) -> SystemEstimate {
    let spec = SystemSpec::with_default_order(p).unwrap();
    let designs = build_system(&sim.panel, sim.panel.series(Role::Yaeur).unwrap(), &spec).unwrap();
    estimate_system(&spec, &designs, &SurOptions::default()).unwrap()
}

/// Absolute error of every free coefficient against the DGP, labelled.
pub fn coefficient_errors(est: &SystemEstimate, dgp: &DgpSpec) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for (i, eq) in est.equations.iter().enumerate() {
        for (label, &value) in eq.labels.iter().zip(&eq.coefficients) {
            let truth = match *label {
                Regressor::Intercept => dgp.intercepts[i],
                Regressor::Lag { role: Role::Yaeur, lag } => dgp.exogenous_loadings[lag],
                Regressor::Lag { role, lag } => {
                    let col = est.spec.position(role).unwrap();
                    dgp.lag_matrices[lag - 1][i][col]
                }
            };
            out.push((format!("{} ~ {label}", eq.response), (value - truth).abs()));
        }
    }
    out
}

/// Every file under `root` with its bytes, keyed by relative path.
pub fn tree_bytes(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

pub fn cli(args: &[&str]) -> i32 {
    partialvar::cli::run(std::iter::once("partialvar").chain(args.iter().copied()))
}
