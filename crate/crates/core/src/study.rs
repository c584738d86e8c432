//! Mesh-refinement studies: the first eigenvalues over a list of `N`,
//! compared against the published tables, exact values and observed rates.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::thread;

use serde::Serialize;
use thiserror::Error;

use crate::assembly::{assemble, AssemblyError, BoundaryCondition, DofMap};
use crate::eigensolve::{solve, EigenError, EigenResult, SolverKind, SolverOptions};
use crate::element::{build_reference_element, ElementError};
use crate::mesh::{CartesianMesh, MeshError};

/// Largest `N` accepted for 3D runs.
pub const MAX_3D_N: usize = 16;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("3D meshes with N = {0} are beyond desk scale (at most {MAX_3D_N}); the published N = 32 columns are not reproduced")]
    BeyondDeskScale(usize),
    #[error("unknown table {0}; expected 1, 2, 3 or 4")]
    UnknownTable(u32),
    #[error("no exact eigenvalue is known for the {bc} plate (index {index}); rerun with Richardson extrapolation, which is not part of the published study")]
    NoExactValue { bc: BoundaryCondition, index: usize },
    #[error("Richardson extrapolation needs at least two mesh sizes")]
    RichardsonNeedsTwoMeshes,
    #[error("eigenvalue index {index} is outside 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("at least one mesh size is required")]
    EmptyMeshList,
    #[error("solver did not converge at N = {n} (largest residual {residual:e})")]
    NotConverged { n: usize, residual: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// The four published configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableId(u32);

struct Published {
    dim: usize,
    bc: BoundaryCondition,
    ns: &'static [usize],
    /// `values[index][column]`.
    values: [&'static [f64]; 6],
    /// Multiples of `π⁴`.
    exact: Option<[f64; 6]>,
    /// `rates[index][column - 1]`.
    rates: [Option<&'static [f64]>; 6],
}

const T1: Published = Published {
    dim: 2,
    bc: BoundaryCondition::Clamped,
    ns: &[4, 8, 12, 16, 32],
    values: [
        &[1075.8563, 1223.1076, 1261.1771, 1275.5592, 1289.9935],
        &[4481.4554, 5017.6904, 5205.0626, 5280.6461, 5359.1648],
        &[4481.4554, 5017.6904, 5205.0626, 5280.6461, 5359.1648],
        &[7697.5590, 9953.5911, 10819.5084, 11183.7787, 11572.2467],
        &[15704.3199, 16244.1142, 16743.9469, 16971.6555, 17222.4239],
        &[16296.5202, 16520.5023, 16955.9294, 17162.3431, 17393.3846],
    ],
    exact: None,
    rates: [None; 6],
};

const T2_R1: &[f64] = &[1.816267, 1.937758, 1.968793, 1.987512];
const T2_R23: &[f64] = &[1.564173, 1.848565, 1.923527, 1.969013];
const T2_R4: &[f64] = &[1.422239, 1.770756, 1.880399, 1.950661];
const T2_R56: &[f64] = &[0.954369, 1.671838, 1.836346, 1.933997];

const T2: Published = Published {
    dim: 2,
    bc: BoundaryCondition::SimplySupported,
    ns: &[4, 8, 12, 16, 32],
    values: [
        &[347.5266, 377.6791, 384.1862, 386.5430, 388.8563],
        &[2104.3141, 2323.3219, 2382.3420, 2404.8176, 2427.4598],
        &[2104.3141, 2323.3219, 2382.3420, 2404.8176, 2427.4598],
        &[4428.5078, 5560.4260, 5905.5665, 6042.8650, 6184.6886],
        &[8883.3154, 9298.3330, 9516.2149, 9608.4258, 9706.2378],
        &[8883.3154, 9298.3330, 9516.2149, 9608.4258, 9706.2378],
    ],
    exact: Some([4.0, 25.0, 25.0, 64.0, 100.0, 100.0]),
    rates: [Some(T2_R1), Some(T2_R23), Some(T2_R23), Some(T2_R4), Some(T2_R56), Some(T2_R56)],
};

const T3: Published = Published {
    dim: 3,
    bc: BoundaryCondition::Clamped,
    ns: &[4, 8, 12, 16],
    values: [
        &[1714.3524, 2136.8429, 2255.9156, 2302.1447],
        &[5174.6283, 6369.4367, 6796.5628, 6972.4742],
        &[5174.6283, 6369.4367, 6796.5628, 6972.4742],
        &[5174.6283, 6369.4367, 6796.5628, 6972.4742],
        &[8539.6777, 11655.1631, 12920.9204, 13468.3120],
        &[8539.6777, 11655.1631, 12920.9204, 13468.3120],
    ],
    exact: None,
    rates: [None; 6],
};

const T4_R1: &[f64] = &[1.702863, 1.894823, 1.946762];
const T4_R234: &[f64] = &[1.490027, 1.809503, 1.902066];
const T4_R56: &[f64] = &[1.334896, 1.724958, 1.854797];

const T4: Published = Published {
    dim: 3,
    bc: BoundaryCondition::SimplySupported,
    ns: &[4, 8, 12, 16],
    values: [
        &[718.3621, 828.0498, 854.1259, 863.7983],
        &[2720.0885, 3226.6792, 3372.2667, 3428.9320],
        &[2720.0885, 3226.6792, 3372.2667, 3428.9320],
        &[2720.0885, 3226.6792, 3372.2667, 3428.9320],
        &[5246.9541, 6842.3245, 7369.5014, 7584.7868],
        &[5246.9541, 6842.3245, 7369.5014, 7584.7868],
    ],
    exact: Some([9.0, 36.0, 36.0, 36.0, 81.0, 81.0]),
    rates: [Some(T4_R1), Some(T4_R234), Some(T4_R234), Some(T4_R234), Some(T4_R56), Some(T4_R56)],
};

const TABLES: [&Published; 4] = [&T1, &T2, &T3, &T4];

impl TableId {
    pub fn new(which: u32) -> Result<Self, StudyError> {
        if (1..=4).contains(&which) {
            Ok(Self(which))
        } else {
            Err(StudyError::UnknownTable(which))
        }
    }

    pub fn all() -> [TableId; 4] {
        [TableId(1), TableId(2), TableId(3), TableId(4)]
    }

    pub fn for_case(dim: usize, bc: BoundaryCondition) -> Option<Self> {
        Self::all().into_iter().find(|t| t.dim() == dim && t.bc() == bc)
    }

    pub fn number(self) -> u32 {
        self.0
    }

    fn data(self) -> &'static Published {
        TABLES[self.0 as usize - 1]
    }

    pub fn dim(self) -> usize {
        self.data().dim
    }

    pub fn bc(self) -> BoundaryCondition {
        self.data().bc
    }

    /// The published mesh sizes, minus those beyond desk scale.
    pub fn default_ns(self) -> Vec<usize> {
        self.data().ns.iter().copied().filter(|&n| self.dim() == 2 || n <= MAX_3D_N).collect()
    }

    /// Published `λ_{index,h}` at `n` (index is one-based).
    pub fn published(self, index: usize, n: usize) -> Option<f64> {
        let d = self.data();
        let col = d.ns.iter().position(|&m| m == n)?;
        d.values.get(index.checked_sub(1)?).map(|row| row[col])
    }

    /// Published rate between `n` and the preceding published size.
    pub fn published_rate(self, index: usize, n: usize) -> Option<f64> {
        let d = self.data();
        let col = d.ns.iter().position(|&m| m == n)?.checked_sub(1)?;
        d.rates.get(index.checked_sub(1)?).copied().flatten().map(|r| r[col])
    }
}

/// Exact eigenvalue `index` (one-based) of the unit square or cube plate,
/// where the published study lists one.
pub fn exact_eigenvalue(dim: usize, bc: BoundaryCondition, index: usize) -> Option<f64> {
    let t = TableId::for_case(dim, bc)?;
    let m = t.data().exact?.get(index.checked_sub(1)?).copied()?;
    Some(m * PI.powi(4))
}

/// `ln(e_prev / e_cur) / ln(n_cur / n_prev)`.
pub fn convergence_rate(e_prev: f64, e_cur: f64, n_prev: usize, n_cur: usize) -> f64 {
    (e_prev / e_cur).ln() / (n_cur as f64 / n_prev as f64).ln()
}

/// `λ* = (N₂² λ₂ - N₁² λ₁) / (N₂² - N₁²)` under an `O(N⁻²)` error model.
pub fn richardson(n1: usize, lambda1: f64, n2: usize, lambda2: f64) -> f64 {
    let (a, b) = ((n1 * n1) as f64, (n2 * n2) as f64);
    (b * lambda2 - a * lambda1) / (b - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMode {
    /// Exact values where known, none otherwise.
    #[default]
    Auto,
    /// Exact values required; fails for clamped plates.
    Exact,
    /// Extrapolated from the two finest meshes. Not part of the published study.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    None,
    Exact,
    Richardson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub dim: usize,
    pub bc: BoundaryCondition,
    pub ns: Vec<usize>,
    pub k: usize,
    pub solver: SolverOptions,
    pub reference: ReferenceMode,
    /// Worker threads for independent meshes.
    pub threads: usize,
}

impl StudyConfig {
    pub fn new(dim: usize, bc: BoundaryCondition, ns: Vec<usize>) -> Self {
        Self {
            dim,
            bc,
            ns,
            k: 6,
            solver: SolverOptions::for_bc(bc),
            reference: ReferenceMode::Auto,
            threads: 1,
        }
    }

    pub fn for_table(table: TableId) -> Self {
        Self::new(table.dim(), table.bc(), table.default_ns())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    /// One-based.
    pub index: usize,
    pub lambda_h: f64,
    pub exact: Option<f64>,
    /// `exact - λ_h`.
    pub error: Option<f64>,
    pub rate: Option<f64>,
    /// `λ_h` strictly above its value on the previous mesh.
    pub monotone: Option<bool>,
    pub published: Option<f64>,
    pub published_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub n: usize,
    pub free_dofs: usize,
    pub method: SolverKind,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub dim: usize,
    pub bc: BoundaryCondition,
    pub table: Option<u32>,
    pub reference: ReferenceKind,
    pub ns: Vec<usize>,
    pub k: usize,
    pub runs: Vec<RunSummary>,
    /// Ordered by index, then `N`.
    pub rows: Vec<ReportRow>,
}

/// A solved configuration: the DOF numbering and the eigenpairs.
pub struct SolvedCase {
    pub dofmap: DofMap,
    pub result: EigenResult,
}

pub fn validate_size(dim: usize, n: usize) -> Result<(), StudyError> {
    if dim == 3 && n > MAX_3D_N {
        return Err(StudyError::BeyondDeskScale(n));
    }
    Ok(())
}

/// Assembles and solves one mesh. Fails when any residual exceeds the
/// solver tolerance.
pub fn solve_case(
    dim: usize,
    n: usize,
    bc: BoundaryCondition,
    k: usize,
    solver: &SolverOptions,
) -> Result<SolvedCase, StudyError> {
    validate_size(dim, n)?;
    let reference = build_reference_element(dim)?;
    let mesh = CartesianMesh::unit(dim, n)?;
    let dofmap = DofMap::new(&mesh, bc)?;
    let system = assemble(&dofmap, &reference)?;
    let result = solve(&system.stiffness, &system.mass, k, solver)?;
    if !result.metadata.converged {
        let residual = result.residuals.iter().copied().fold(0.0, f64::max);
        return Err(StudyError::NotConverged { n, residual });
    }
    Ok(SolvedCase { dofmap, result })
}

/// Solves every mesh in `config.ns` (sorted, deduplicated) and tabulates.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport, StudyError> {
    let mut ns = config.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(StudyError::EmptyMeshList);
    }
    for &n in &ns {
        validate_size(config.dim, n)?;
    }
    let mut reference = match config.reference {
        ReferenceMode::Richardson if ns.len() < 2 => return Err(StudyError::RichardsonNeedsTwoMeshes),
        ReferenceMode::Richardson => ReferenceKind::Richardson,
        ReferenceMode::Exact => {
            for index in 1..=config.k {
                if exact_eigenvalue(config.dim, config.bc, index).is_none() {
                    return Err(StudyError::NoExactValue { bc: config.bc, index });
                }
            }
            ReferenceKind::Exact
        }
        ReferenceMode::Auto => ReferenceKind::None,
    };
    if config.reference == ReferenceMode::Auto && exact_eigenvalue(config.dim, config.bc, 1).is_some() {
        reference = ReferenceKind::Exact;
    }

    let solved = solve_all(config, &ns)?;
    let mut values = Vec::with_capacity(ns.len());
    let mut runs = Vec::with_capacity(ns.len());
    for (&n, case) in ns.iter().zip(solved) {
        runs.push(RunSummary {
            n,
            free_dofs: case.dofmap.free_count(),
            method: case.result.metadata.method,
            max_residual: case.result.residuals.iter().copied().fold(0.0, f64::max),
        });
        values.push(case.result.eigenvalues);
    }
    Ok(tabulate(config, &ns, &values, reference, runs))
}

/// Meshes are split round-robin over `config.threads` workers; results come
/// back in mesh order so the report does not depend on the thread count.
fn solve_all(config: &StudyConfig, ns: &[usize]) -> Result<Vec<SolvedCase>, StudyError> {
    let workers = config.threads.clamp(1, ns.len());
    if workers == 1 {
        return ns
            .iter()
            .map(|&n| solve_case(config.dim, n, config.bc, config.k, &config.solver))
            .collect();
    }
    let mut slots: Vec<Option<Result<SolvedCase, StudyError>>> = (0..ns.len()).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    (w..ns.len())
                        .step_by(workers)
                        .map(|i| (i, solve_case(config.dim, ns[i], config.bc, config.k, &config.solver)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("solver thread panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every mesh solved")).collect()
}

fn tabulate(
    config: &StudyConfig,
    ns: &[usize],
    values: &[Vec<f64>],
    reference: ReferenceKind,
    runs: Vec<RunSummary>,
) -> StudyReport {
    let table = TableId::for_case(config.dim, config.bc);
    let last = ns.len() - 1;
    let mut rows = Vec::with_capacity(ns.len() * config.k);
    for index in 1..=config.k {
        let exact = match reference {
            ReferenceKind::None => None,
            ReferenceKind::Exact => exact_eigenvalue(config.dim, config.bc, index),
            ReferenceKind::Richardson => Some(richardson(
                ns[last - 1],
                values[last - 1][index - 1],
                ns[last],
                values[last][index - 1],
            )),
        };
        for (col, &n) in ns.iter().enumerate() {
            let lambda_h = values[col][index - 1];
            let error = exact.map(|e| e - lambda_h);
            let (rate, monotone) = if col == 0 {
                (None, None)
            } else {
                let prev = values[col - 1][index - 1];
                let rate = exact.map(|e| convergence_rate(e - prev, e - lambda_h, ns[col - 1], n));
                (rate, Some(lambda_h > prev))
            };
            let previous_published = col > 0 && ns[col - 1] == previous_table_n(table, n);
            rows.push(ReportRow {
                n,
                index,
                lambda_h,
                exact,
                error,
                rate,
                monotone,
                published: table.and_then(|t| t.published(index, n)),
                published_rate: table
                    .filter(|_| previous_published)
                    .and_then(|t| t.published_rate(index, n)),
            });
        }
    }
    StudyReport {
        dim: config.dim,
        bc: config.bc,
        table: table.map(TableId::number),
        reference,
        ns: ns.to_vec(),
        k: config.k,
        runs,
        rows,
    }
}

fn previous_table_n(table: Option<TableId>, n: usize) -> usize {
    table
        .and_then(|t| {
            let ns = t.data().ns;
            let col = ns.iter().position(|&m| m == n)?;
            col.checked_sub(1).map(|c| ns[c])
        })
        .unwrap_or(0)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl StudyReport {
    pub fn row(&self, index: usize, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.index == index && r.n == n)
    }

    /// Rows for one eigenvalue, in increasing `N`.
    pub fn index_rows(&self, index: usize) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.index == index)
    }

    /// Keeps only the rows of eigenvalue `index`.
    pub fn restrict_to_index(mut self, index: usize) -> Result<Self, StudyError> {
        if index == 0 || index > self.k {
            return Err(StudyError::IndexOutOfRange { index, k: self.k });
        }
        self.rows.retain(|r| r.index == index);
        Ok(self)
    }

    /// Every index increases strictly from each mesh to the next.
    pub fn all_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone != Some(false))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,index,lambda_h,exact,error,rate,monotone,published,published_rate\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                r.index,
                r.lambda_h,
                opt(r.exact),
                opt(r.error),
                opt(r.rate),
                r.monotone.map(|m| m.to_string()).unwrap_or_default(),
                opt(r.published),
                opt(r.published_rate),
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per eigenvalue with a column per `N`, followed by a rate
    /// line when a reference value is available.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let title = match self.table {
            Some(t) => format!("Table {t}: "),
            None => String::new(),
        };
        let _ = writeln!(s, "{title}first {} eigenvalues, {}D, {} plate", self.k, self.dim, self.bc);
        let _ = write!(s, "{:<12}", "N");
        for n in &self.ns {
            let _ = write!(s, "{n:>14}");
        }
        let ref_header = match self.reference {
            ReferenceKind::None => "",
            ReferenceKind::Exact => "exact",
            ReferenceKind::Richardson => "richardson*",
        };
        let _ = writeln!(s, "{:>6}{ref_header:>16}", "");
        let indices: Vec<usize> = {
            let mut v: Vec<usize> = self.rows.iter().map(|r| r.index).collect();
            v.dedup();
            v
        };
        for index in indices {
            let rows: Vec<&ReportRow> = self.index_rows(index).collect();
            let _ = write!(s, "{:<12}", format!("lambda_{index},h"));
            for r in &rows {
                let _ = write!(s, "{:>14.4}", r.lambda_h);
            }
            let trend = if rows.iter().all(|r| r.monotone != Some(false)) { "up" } else { "--" };
            let _ = write!(s, "{trend:>6}");
            match rows[0].exact {
                Some(e) => {
                    let _ = writeln!(s, "{e:>16.4}");
                }
                None => s.push('\n'),
            }
            if rows[0].exact.is_some() {
                let _ = write!(s, "{:<12}", "r");
                for r in &rows {
                    match r.rate {
                        Some(v) => {
                            let _ = write!(s, "{v:>14.6}");
                        }
                        None => {
                            let _ = write!(s, "{:>14}", "---");
                        }
                    }
                }
                s.push('\n');
            }
        }
        if self.reference == ReferenceKind::Richardson {
            s.push_str("* extrapolated from the two finest meshes; not a published value\n");
        }
        for run in &self.runs {
            let _ = writeln!(
                s,
                "N={}: {} free DOFs, {} solver, max residual {:.1e}",
                run.n, run.free_dofs, run.method, run.max_residual
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn published_lookup() {
        let t2 = TableId::new(2).unwrap();
        assert_eq!(t2.published(1, 32), Some(388.8563));
        assert_eq!(t2.published_rate(1, 8), Some(1.816267));
        assert_eq!(t2.published_rate(1, 4), None);
        assert_eq!(t2.published(7, 4), None);
        assert_eq!(TableId::new(4).unwrap().default_ns(), vec![4, 8, 12, 16]);
        assert!(matches!(TableId::new(5), Err(StudyError::UnknownTable(5))));
        assert_eq!(TableId::for_case(3, BoundaryCondition::Clamped).unwrap().number(), 3);
    }

    #[test]
    fn exact_values() {
        let e = exact_eigenvalue(2, BoundaryCondition::SimplySupported, 1).unwrap();
        assert!((e - 389.6364).abs() < 1e-4);
        let e = exact_eigenvalue(3, BoundaryCondition::SimplySupported, 5).unwrap();
        assert!((e - 7890.1364).abs() < 1e-4);
        assert!(exact_eigenvalue(2, BoundaryCondition::Clamped, 1).is_none());
        assert!(exact_eigenvalue(2, BoundaryCondition::SimplySupported, 7).is_none());
    }

    #[test]
    fn published_rates_follow_from_published_values() {
        for t in [TableId::new(2).unwrap(), TableId::new(4).unwrap()] {
            let ns = t.data().ns;
            for index in 1..=6 {
                let exact = exact_eigenvalue(t.dim(), t.bc(), index).unwrap();
                for w in ns.windows(2) {
                    let e0 = exact - t.published(index, w[0]).unwrap();
                    let e1 = exact - t.published(index, w[1]).unwrap();
                    let r = convergence_rate(e0, e1, w[0], w[1]);
                    let printed = t.published_rate(index, w[1]).unwrap();
                    assert!((r - printed).abs() < 1e-3, "table {} index {index} N {}: {r}", t.number(), w[1]);
                }
            }
        }
    }

    #[test]
    fn richardson_is_exact_for_quadratic_error() {
        let f = |n: usize| 10.0 - 3.0 / (n * n) as f64;
        assert!((richardson(8, f(8), 16, f(16)) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn desk_scale_limit() {
        assert!(matches!(validate_size(3, 32), Err(StudyError::BeyondDeskScale(32))));
        assert!(validate_size(2, 32).is_ok());
    }

    #[test]
    fn clamped_exact_mode_is_refused() {
        let mut c = StudyConfig::new(2, BoundaryCondition::Clamped, vec![4]);
        c.reference = ReferenceMode::Exact;
        assert!(matches!(run_study(&c), Err(StudyError::NoExactValue { .. })));
        c.reference = ReferenceMode::Richardson;
        assert!(matches!(run_study(&c), Err(StudyError::RichardsonNeedsTwoMeshes)));
    }

    #[test]
    fn small_study_formats() {
        let mut c = StudyConfig::new(2, BoundaryCondition::SimplySupported, vec![8, 4]);
        let r = run_study(&c).unwrap();
        c.threads = 3;
        assert_eq!(run_study(&c).unwrap(), r);
        assert_eq!(r.ns, vec![4, 8]);
        assert_eq!(r.rows.len(), 12);
        assert_eq!(r.reference, ReferenceKind::Exact);
        let row = r.row(1, 8).unwrap();
        assert!((row.lambda_h - 377.6791).abs() < 1e-4);
        assert!((row.rate.unwrap() - 1.816267).abs() < 1e-3);
        assert_eq!(row.published_rate, Some(1.816267));
        assert!(r.all_monotone());
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.starts_with("n,index,lambda_h,"));
        let text = r.to_text();
        assert!(text.contains("347.5266") && text.contains("1.816"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 12);
        assert_eq!(json["bc"], "simply-supported");
        let one = r.clone().restrict_to_index(1).unwrap();
        assert_eq!(one.rows.len(), 2);
        assert!(r.restrict_to_index(7).is_err());
    }

    proptest! {
        #[test]
        fn rate_recovers_power_law(c in 0.1f64..100.0, p in 0.5f64..4.0, n0 in 2usize..20, m in 2usize..5) {
            let n1 = n0 * m;
            let e = |n: usize| c * (n as f64).powf(-p);
            prop_assert!((convergence_rate(e(n0), e(n1), n0, n1) - p).abs() < 1e-9);
        }

        #[test]
        fn richardson_exact_on_model(l in 1.0f64..1e4, c in -1e3f64..1e3, n0 in 2usize..20) {
            let f = |n: usize| l + c / (n * n) as f64;
            prop_assert!((richardson(n0, f(n0), 2 * n0, f(2 * n0)) - l).abs() < 1e-8 * l.max(1.0));
        }
    }
}
