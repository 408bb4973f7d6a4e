//! Benchmarks of the three numeric hot paths: the FFT inverse Laplace
//! transform behind the spectral method, the discretized-ensemble RK4
//! integrator, and the Levenberg-Marquardt curve fit.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use spinbus_core::density::GroupLabel;
use spinbus_core::oracle::{self, OracleConfig};
use spinbus_core::spectral::{
    inverse_laplace, rabi_protocol, PoleReference, TransferFunctionGrid,
};
use spinbus_core::spectroscopy::{fit_curve, FitModel};
use spinbus_core::units::{mhz, ns};
use spinbus_core::{BusParams, EnsembleGroup, HybridDeviceModel, SpectralConfig};

fn device_group(device: &HybridDeviceModel) -> (EnsembleGroup, BusParams) {
    let group = device.group(GroupLabel::MinusIII).unwrap().clone();
    let bus = device.bus_at(group.central_frequency()).unwrap();
    (group, bus)
}

fn bench_inverse_laplace(c: &mut Criterion) {
    let device = HybridDeviceModel::published();
    let (group, bus) = device_group(&device);
    let cfg = SpectralConfig::default();
    let grid = cfg.grid(bus.omega_b).unwrap();
    let tf = TransferFunctionGrid::sample(&group, &bus, &grid, 0.0).unwrap();
    let reference = PoleReference {
        amplitude: num_complex::Complex64::new(1.0, 0.0),
        pole: bus.complex_frequency(),
    };
    c.bench_function("inverse_laplace_8000pt", |b| {
        b.iter(|| {
            inverse_laplace(
                black_box(&tf.t1),
                &grid,
                0.0,
                Some(reference),
                ns(500.0),
            )
            .unwrap()
        })
    });
    c.bench_function("rabi_protocol_spectral", |b| {
        b.iter(|| rabi_protocol(black_box(&group), &bus, &cfg, ns(500.0)).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let device = HybridDeviceModel::published();
    let (group, bus) = device_group(&device);
    let cfg = OracleConfig {
        n: 1501,
        span: mhz(300.0),
        dt: None,
    };
    let times = oracle::uniform_times(ns(5.0), ns(150.0));
    c.bench_function("oracle_storage_retrieval_1501", |b| {
        b.iter(|| oracle::storage_retrieval(black_box(&group), &bus, &cfg, &times).unwrap())
    });
}

fn bench_fit(c: &mut Criterion) {
    let device = HybridDeviceModel::published();
    let (group, bus) = device_group(&device);
    let cfg = SpectralConfig::default();
    let curve = rabi_protocol(&group, &bus, &cfg, ns(300.0)).unwrap();
    let stride = 4;
    let xs: Vec<f64> = (0..curve.values.len())
        .step_by(stride)
        .map(|i| i as f64 * curve.dt)
        .collect();
    let ys: Vec<f64> = curve
        .values
        .iter()
        .step_by(stride)
        .map(|v| v.norm_sqr())
        .collect();
    let model = FitModel::RabiLinewidth {
        group: &group,
        bus: &bus,
        cfg: &cfg,
    };
    c.bench_function("fit_rabi_linewidth", |b| {
        b.iter(|| {
            fit_curve(
                black_box(&model),
                &xs,
                &ys,
                &[mhz(3.0)],
                Some(&[(mhz(0.2), mhz(20.0))]),
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_inverse_laplace, bench_oracle, bench_fit);
criterion_main!(benches);
