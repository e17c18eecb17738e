//! Occlusion scans of the detector plane: which windows drive which charge.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::loss::mse;
use crate::model::HybridModel;
use crate::modes::synthesize;
use crate::readout::{relu, ReadoutNetwork};
use crate::spectrum::{argmax, ComplexSpectrum, OamSpectrum, SpectrumBasis};
use crate::training::dataset::{draw_phases, draw_weights, label_from};

pub const DEFAULT_WINDOW: usize = 2;
pub const DEFAULT_PROBES: usize = 200;

/// How a probe picks the charge that "sticks out" under a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VoteRule {
    /// Largest rise over the output for a dark detector. A few pixels carry
    /// little light, so the raw output is mostly the dark response.
    #[default]
    Response,
    /// Argmax of the windowed output itself.
    Argmax,
}

/// Cell grid of winning charges with the per-cell vote counts behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicGraph {
    pub detector_side: usize,
    pub window: usize,
    pub stride: usize,
    /// Cells per side.
    pub cells: usize,
    pub k_n: i32,
    /// Winning charge per cell, row-major.
    pub labels: Vec<i32>,
    /// Votes per basis index per cell.
    pub votes: Vec<Vec<u32>>,
    pub epoch: Option<usize>,
}

impl CharacteristicGraph {
    /// Top-left detector pixel of a cell.
    pub fn cell_origin(&self, cell: usize) -> (usize, usize) {
        ((cell / self.cells) * self.stride, (cell % self.cells) * self.stride)
    }

    pub fn cell_pixels(&self, cell: usize) -> Vec<usize> {
        let (r0, c0) = self.cell_origin(cell);
        (r0..r0 + self.window)
            .flat_map(|r| (c0..c0 + self.window).map(move |c| r * self.detector_side + c))
            .collect()
    }

    /// Share of probes that voted for the winning charge.
    pub fn confidence(&self, cell: usize) -> f64 {
        let v = &self.votes[cell];
        let total: u32 = v.iter().sum();
        if total == 0 {
            0.0
        } else {
            *v.iter().max().unwrap_or(&0) as f64 / total as f64
        }
    }

    pub fn distinct_labels(&self) -> Vec<i32> {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Fraction of cells whose label differs from `other`.
    pub fn change_fraction(&self, other: &CharacteristicGraph) -> Result<f64> {
        if self.labels.len() != other.labels.len() {
            return Err(Error::Dimension("graphs have different cell grids".into()));
        }
        let changed = self.labels.iter().zip(&other.labels).filter(|(a, b)| a != b).count();
        Ok(changed as f64 / self.labels.len() as f64)
    }
}

/// Readout output when only `pixels` of the detector image are kept.
pub fn masked_readout(net: &ReadoutNetwork, detector: &[f64], pixels: &[usize]) -> Result<Vec<f64>> {
    let first = &net.layers[0];
    if detector.len() != first.inputs {
        return Err(Error::Dimension(format!(
            "detector has {} pixels, readout expects {}",
            detector.len(),
            first.inputs
        )));
    }
    let mut a: Vec<f64> = first
        .weights
        .chunks_exact(first.inputs)
        .zip(&first.bias)
        .map(|(row, b)| b + pixels.iter().map(|&p| row[p] * detector[p] * net.input_gain).sum::<f64>())
        .collect();
    for layer in &net.layers[1..] {
        a.iter_mut().for_each(|v| *v = relu(*v));
        a = layer.forward(&a);
    }
    Ok(net.head_output(&a)?.weights)
}

/// Slides a `window x window` aperture over the detector; each probe votes
/// for one charge of the occluded output (see [`VoteRule`]), and a cell
/// takes the most-voted charge (lowest charge on ties).
pub fn occlusion_scan(model: &HybridModel, probes: &[ComplexField], window: usize, stride: usize, rule: VoteRule) -> Result<CharacteristicGraph> {
    let side = model.grid().n;
    if window == 0 || window > side || stride == 0 {
        return Err(Error::InvalidParameter(format!(
            "window {window} with stride {stride} does not fit a {side}-pixel detector"
        )));
    }
    if probes.is_empty() {
        return Err(Error::InvalidParameter("occlusion scan needs at least one probe".into()));
    }
    let detectors = probes.par_iter().map(|f| model.detector(f)).collect::<Result<Vec<_>>>()?;
    let dark = match rule {
        VoteRule::Response => masked_readout(&model.readout, &vec![0.0; side * side], &[])?,
        VoteRule::Argmax => vec![0.0; model.basis().count()],
    };
    let cells = (side - window) / stride + 1;
    let basis = model.basis();
    let mut graph = CharacteristicGraph {
        detector_side: side,
        window,
        stride,
        cells,
        k_n: basis.k_n,
        labels: Vec::new(),
        votes: Vec::new(),
        epoch: None,
    };
    let votes = (0..cells * cells)
        .into_par_iter()
        .map(|cell| {
            let pixels = graph.cell_pixels(cell);
            let mut v = vec![0u32; basis.count()];
            for d in &detectors {
                let out = masked_readout(&model.readout, d, &pixels)?;
                let rise: Vec<f64> = out.iter().zip(&dark).map(|(o, z)| o - z).collect();
                v[argmax(&rise)] += 1;
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    graph.labels = votes.iter().map(|v| basis.charge(argmax_u32(v))).collect();
    graph.votes = votes;
    Ok(graph)
}

fn argmax_u32(v: &[u32]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Graphs for a sequence of models plus the change fraction between neighbours.
pub fn graph_evolution(
    models: &[(usize, HybridModel)],
    probes: &[ComplexField],
    window: usize,
    rule: VoteRule,
) -> Result<(Vec<CharacteristicGraph>, Vec<f64>)> {
    if models.len() < 2 {
        return Err(Error::InvalidParameter("graph evolution needs at least two checkpoints".into()));
    }
    let mut graphs = Vec::with_capacity(models.len());
    for (epoch, m) in models {
        let mut g = occlusion_scan(m, probes, window, window, rule)?;
        g.epoch = Some(*epoch);
        graphs.push(g);
    }
    let changes = graphs.windows(2).map(|w| w[0].change_fraction(&w[1])).collect::<Result<Vec<_>>>()?;
    Ok((graphs, changes))
}

/// Which cells a reduced readout keeps.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// Every cell labelled with one of these charges.
    Charges(Vec<i32>),
    /// At most this fraction of pixels, filled round-robin over charges in
    /// order of vote confidence.
    Budget(f64),
}

/// Detector pixels kept by a selection, sorted.
pub fn selected_pixels(graph: &CharacteristicGraph, selection: &Selection) -> Vec<usize> {
    let cells: Vec<usize> = match selection {
        Selection::Charges(charges) => (0..graph.labels.len()).filter(|&c| charges.contains(&graph.labels[c])).collect(),
        Selection::Budget(frac) => {
            let total = graph.detector_side * graph.detector_side;
            let per_cell = graph.window * graph.window;
            let max_cells = ((frac * total as f64) / per_cell as f64 + 1e-9).floor() as usize;
            let mut queues: Vec<Vec<usize>> = graph
                .distinct_labels()
                .iter()
                .map(|l| {
                    let mut q: Vec<usize> = (0..graph.labels.len()).filter(|&c| graph.labels[c] == *l).collect();
                    // Ascending, so `pop` yields the most confident (then lowest-index) cell.
                    q.sort_by(|a, b| graph.confidence(*a).total_cmp(&graph.confidence(*b)).then(b.cmp(a)));
                    q
                })
                .collect();
            let mut picked = Vec::new();
            while picked.len() < max_cells && queues.iter().any(|q| !q.is_empty()) {
                for q in &mut queues {
                    if picked.len() >= max_cells {
                        break;
                    }
                    if let Some(c) = q.pop() {
                        picked.push(c);
                    }
                }
            }
            picked
        }
    };
    let mut pixels: Vec<usize> = cells.iter().flat_map(|&c| graph.cell_pixels(c)).collect();
    pixels.sort_unstable();
    pixels.dedup();
    pixels
}

/// Readout restricted to the selected cells; returns the spectrum and the
/// fraction of detector pixels read.
pub fn reduced_readout(model: &HybridModel, graph: &CharacteristicGraph, field: &ComplexField, selection: &Selection) -> Result<(OamSpectrum, f64)> {
    if graph.detector_side != model.grid().n {
        return Err(Error::Dimension("graph was built for a different detector".into()));
    }
    let pixels = selected_pixels(graph, selection);
    let detector = model.detector(field)?;
    let weights = if pixels.len() == detector.len() {
        model.predict_from_detector(&detector)?.weights
    } else {
        masked_readout(&model.readout, &detector, &pixels)?
    };
    Ok((
        OamSpectrum {
            basis: model.basis(),
            weights,
        },
        pixels.len() as f64 / detector.len() as f64,
    ))
}

/// Seeded random multiplexed probe fields.
pub fn random_probes(grid: GridSpec, basis: SpectrumBasis, waist: f64, count: usize, seed: u64) -> Result<Vec<ComplexField>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..count)
        .map(|_| {
            let w = draw_weights(&basis, &mut rng);
            label_from(basis, &w, draw_phases(&basis, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    labels.par_iter().map(|l| synthesize(l, waist, grid)).collect()
}

/// One row of the reduced-readout benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedRow {
    /// `None` for the per-charge selection (only the input charge's cells).
    pub budget: Option<f64>,
    /// Mean fraction of detector pixels read.
    pub fraction: f64,
    /// Single-mode inputs whose reduced argmax is the true charge.
    pub accuracy: f64,
    /// Mean MSE against the full readout over the multiplexed probes.
    pub mse_vs_full: f64,
}

/// Reduced readout per budget plus the per-charge selection. Accuracy uses
/// every single mode of the basis; MSE uses `probes`.
pub fn reduced_readout_benchmark(
    model: &HybridModel,
    graph: &CharacteristicGraph,
    budgets: &[f64],
    waist: f64,
    probes: &[ComplexField],
) -> Result<Vec<ReducedRow>> {
    let basis = model.basis();
    let grid = model.grid();
    let singles = (0..basis.count())
        .map(|i| synthesize(&ComplexSpectrum::from_coefficients(basis, &delta_coeffs(basis.count(), i))?, waist, grid))
        .collect::<Result<Vec<_>>>()?;
    let full = probes.par_iter().map(|f| Ok(model.predict(f)?.weights)).collect::<Result<Vec<_>>>()?;
    let mut selections: Vec<(Option<f64>, Option<Selection>)> = vec![(None, None)];
    selections.extend(budgets.iter().map(|&b| (Some(b), Some(Selection::Budget(b)))));
    selections
        .into_iter()
        .map(|(budget, sel)| {
            let mut hits = 0usize;
            let mut frac = 0.0;
            for (i, f) in singles.iter().enumerate() {
                let s = sel.clone().unwrap_or_else(|| Selection::Charges(vec![basis.charge(i)]));
                let (spec, fr) = reduced_readout(model, graph, f, &s)?;
                hits += usize::from(spec.argmax() == i);
                frac += fr;
            }
            let mse_vs_full = match &sel {
                Some(s) => {
                    let errs = probes
                        .par_iter()
                        .zip(&full)
                        .map(|(f, w)| mse(&reduced_readout(model, graph, f, s)?.0.weights, w))
                        .collect::<Result<Vec<_>>>()?;
                    errs.iter().sum::<f64>() / errs.len().max(1) as f64
                }
                None => f64::NAN,
            };
            let k = singles.len() as f64;
            Ok(ReducedRow {
                budget,
                fraction: frac / k,
                accuracy: hits as f64 / k,
                mse_vs_full,
            })
        })
        .collect()
}

fn delta_coeffs(k: usize, i: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); k];
    c[i] = Complex64::new(1.0, 0.0);
    c
}
