//! CSV and JSON records for kernels, resolvents, spectra, estimates and
//! packets. Floats are written in shortest round-trip form, so reading an
//! emitted file back reproduces the in-memory values bit for bit.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bc::{Domain, NamedBc};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::path_mc::{McConfig, McEstimate};
use crate::propagator::WavePacket;
use crate::spectral::Spectrum;

/// Points per eigenfunction in spectrum dumps.
pub const SPECTRUM_SAMPLES: usize = 257;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("serialisation failed: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

impl KernelRow {
    pub fn new(x: f64, y: f64, t: f64, v: C64) -> Self {
        KernelRow { x, y, t, re: v.re, im: v.im }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventRow {
    pub x: f64,
    pub y: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub domain: Domain,
    pub bc: String,
    pub method: String,
}

impl Metadata {
    pub fn new(domain: Domain, bc: &NamedBc, method: &str) -> Self {
        Metadata {
            domain,
            bc: bc.to_string(),
            method: method.to_string(),
        }
    }
}

/// Rows plus the metadata describing how they were computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

/// Flat estimate record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub method: String,
    pub bc: String,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
}

impl EstimateRecord {
    pub fn new(est: &McEstimate, cfg: &McConfig, bc: &NamedBc) -> Self {
        EstimateRecord {
            method: est.method.to_string(),
            bc: bc.to_string(),
            x: cfg.x,
            y: cfg.y,
            t: cfg.t,
            mean_re: est.mean.re,
            mean_im: est.mean.im,
            std_error: est.std_error,
            n_paths: est.n_paths,
            n_steps: est.n_steps,
            seed: est.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// One `[re, im]` sample list per eigenfunction, on a uniform grid of [0, 1].
    pub samples: Vec<Vec<[f64; 2]>>,
}

pub fn spectrum_records(spec: &Spectrum, points: usize) -> Vec<SpectrumRecord> {
    let h = 1.0 / (points.max(2) - 1) as f64;
    spec.pairs
        .iter()
        .map(|pair| SpectrumRecord {
            eigenvalue: pair.eigenvalue,
            multiplicity: pair.multiplicity,
            samples: pair
                .eigenfunctions
                .iter()
                .map(|f| {
                    (0..points)
                        .map(|i| {
                            let v = f.eval(i as f64 * h);
                            [v.re, v.im]
                        })
                        .collect()
                })
                .collect(),
        })
        .collect()
}

/// Flat CSV view of a spectrum: one row per eigenvalue and eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketRow {
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

pub fn packet_rows(p: &WavePacket) -> Vec<PacketRow> {
    p.grid()
        .into_iter()
        .zip(&p.samples)
        .map(|(x, v)| PacketRow { x, re: v.re, im: v.im })
        .collect()
}

pub fn write_csv<R: Serialize, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_csv<R: DeserializeOwned, Rd: Read>(input: Rd) -> Result<Vec<R>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()
        .map_err(io_err)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io_err)?;
    out.write_all(b"\n").map_err(io_err)
}

pub fn read_json<T: DeserializeOwned, Rd: Read>(input: Rd) -> Result<T> {
    serde_json::from_reader(input).map_err(io_err)
}
