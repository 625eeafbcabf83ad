//! Resolution of a parsed document into core objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use cartan_core::algebroid::{build_action_algebroid, build_foliation_algebroid, build_poisson_algebroid, Algebroid, LieAlgebra};
use cartan_core::bundles::{Section, Slot, TensorField};
use cartan_core::cartan::Parallelism;
use cartan_core::connections::{Bundle, TMConnection};
use cartan_core::symcore::matrix::ExprMatrix;
use cartan_core::symcore::{parse_expr, parse_rational, Chart, Expr, Rational, Sampling};

use crate::document::{GeometrySpec, LieAlgebraSpec, Table, Table3};
use crate::error::InputError;

/// Names under which algebroids can be referenced, in report order.
pub const ALGEBROID_NAMES: [&str; 5] = ["algebroid", "action", "poisson", "foliation", "tangent"];

#[derive(Clone, Debug)]
pub struct MetricData {
    pub sigma: TensorField,
    pub h_frame: Option<Vec<ExprMatrix>>,
    pub killing: Vec<Section>,
}

#[derive(Clone, Debug)]
pub struct NamedConnection {
    pub name: String,
    pub on: String,
    pub conn: TMConnection,
}

/// Everything a document describes, built and shape-checked.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub spec: GeometrySpec,
    pub chart: Arc<Chart>,
    pub algebroids: BTreeMap<String, Algebroid>,
    pub connections: Vec<NamedConnection>,
    pub poisson: Option<TensorField>,
    pub metric: Option<MetricData>,
    pub parallelism: Option<Parallelism>,
}

impl Geometry {
    pub fn algebroid(&self, name: &str) -> &Algebroid {
        &self.algebroids[name]
    }

    /// Declared algebroids in a fixed order, `tangent` last.
    pub fn algebroids_in_order(&self) -> Vec<(&str, &Algebroid)> {
        ALGEBROID_NAMES.iter().filter_map(|n| self.algebroids.get(*n).map(|g| (*n, g))).collect()
    }
}

struct Ctx<'a> {
    chart: &'a Chart,
}

impl Ctx<'_> {
    fn expr(&self, s: &str, path: &str) -> Result<Expr, InputError> {
        parse_expr(s, self.chart).map_err(|e| InputError::core(path, e))
    }

    fn row(&self, row: &[String], len: usize, path: &str) -> Result<Vec<Expr>, InputError> {
        if row.len() != len {
            return Err(InputError::new(path, format!("expected {} entries, found {}", len, row.len())));
        }
        row.iter().enumerate().map(|(k, s)| self.expr(s, &format!("{}/{}", path, k))).collect()
    }

    fn table(&self, t: &Table, rows: usize, cols: usize, path: &str) -> Result<ExprMatrix, InputError> {
        if t.len() != rows {
            return Err(InputError::new(path, format!("expected {} rows, found {}", rows, t.len())));
        }
        t.iter().enumerate().map(|(k, r)| self.row(r, cols, &format!("{}/{}", path, k))).collect()
    }

    /// A list of rows of common length `cols`; the number of rows is free but must be positive.
    fn rows(&self, t: &Table, cols: usize, path: &str) -> Result<ExprMatrix, InputError> {
        if t.is_empty() {
            return Err(InputError::new(path, "at least one row is required"));
        }
        self.table(t, t.len(), cols, path)
    }

    fn table3(&self, t: &Table3, d: [usize; 3], path: &str) -> Result<Vec<ExprMatrix>, InputError> {
        if t.len() != d[0] {
            return Err(InputError::new(path, format!("expected {} blocks, found {}", d[0], t.len())));
        }
        t.iter().enumerate().map(|(k, m)| self.table(m, d[1], d[2], &format!("{}/{}", path, k))).collect()
    }
}

fn rational(s: &str, path: &str) -> Result<Rational, InputError> {
    parse_rational(s).map_err(|e| InputError::core(path, e))
}

fn lie_algebra(spec: &LieAlgebraSpec, dim: usize, path: &str) -> Result<LieAlgebra, InputError> {
    let alg = match (&spec.named, &spec.structure) {
        (Some(name), None) => match name.as_str() {
            "so3" => LieAlgebra::so3(),
            "aff1" => LieAlgebra::aff1(),
            "sl2" => LieAlgebra::sl2(),
            "abelian" => LieAlgebra::abelian(dim),
            other => return Err(InputError::new(format!("{}/named", path), format!("unknown Lie algebra `{}`", other))),
        },
        (None, Some(f)) => {
            let sp = format!("{}/structure", path);
            if f.len() != dim || f.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
                return Err(InputError::new(sp, format!("structure constants must be {} x {} x {}", dim, dim, dim)));
            }
            let mut consts = Vec::with_capacity(dim);
            for (a, m) in f.iter().enumerate() {
                let mut rows = Vec::with_capacity(dim);
                for (b, r) in m.iter().enumerate() {
                    rows.push(
                        r.iter().enumerate().map(|(c, s)| rational(s, &format!("{}/{}/{}/{}", sp, a, b, c))).collect::<Result<Vec<_>, _>>()?,
                    );
                }
                consts.push(rows);
            }
            LieAlgebra::new(consts).map_err(|e| InputError::core(sp, e))?
        }
        _ => return Err(InputError::new(path, "give exactly one of `named` and `structure`")),
    };
    if alg.dim() != dim {
        return Err(InputError::new(path, format!("algebra has dimension {}, expected {}", alg.dim(), dim)));
    }
    Ok(alg)
}

fn require_pair<A, B>(a: &Option<A>, b: &Option<B>, a_name: &str, b_name: &str) -> Result<(), InputError> {
    match (a.is_some(), b.is_some()) {
        (true, false) => Err(InputError::new(format!("/{}", b_name), format!("`{}` requires `{}`", a_name, b_name))),
        (false, true) => Err(InputError::new(format!("/{}", a_name), format!("`{}` requires `{}`", b_name, a_name))),
        _ => Ok(()),
    }
}

/// Build every object in the document on a chart sampled with `sampling`.
pub fn build(spec: &GeometrySpec, sampling: Sampling) -> Result<Geometry, InputError> {
    let cs = &spec.chart;
    if cs.coords.len() != cs.bounds.len() {
        return Err(InputError::new("/chart/bounds", format!("{} coordinates but {} intervals", cs.coords.len(), cs.bounds.len())));
    }
    if cs.coords.is_empty() {
        return Err(InputError::new("/chart/coords", "at least one coordinate is required"));
    }
    let bounds = cs
        .bounds
        .iter()
        .enumerate()
        .map(|(k, [lo, hi])| Ok((rational(lo, &format!("/chart/bounds/{}/0", k))?, rational(hi, &format!("/chart/bounds/{}/1", k))?)))
        .collect::<Result<Vec<_>, InputError>>()?;
    let chart = Arc::new(Chart::with_sampling(&cs.coords, bounds, sampling).map_err(|e| InputError::core("/chart", e))?);
    let n = chart.dim();
    let cx = Ctx { chart: &chart };

    require_pair(&spec.lie_algebra, &spec.action_fields, "lie_algebra", "action_fields")?;
    if spec.metric.is_none() {
        for (field, present) in [("h_frame", spec.h_frame.is_some()), ("killing_fields", spec.killing_fields.is_some())] {
            if present {
                return Err(InputError::new(format!("/{}", field), format!("`{}` requires `metric`", field)));
            }
        }
    }

    let mut algebroids = BTreeMap::new();
    algebroids.insert("tangent".to_string(), Algebroid::tangent(chart.clone()));

    if let Some(a) = &spec.algebroid {
        let rank = a.structure.len();
        let anchor = cx.table(&a.anchor, n, rank, "/algebroid/anchor")?;
        let structure = cx.table3(&a.structure, [rank, rank, rank], "/algebroid/structure")?;
        let g = Algebroid::new(chart.clone(), anchor, structure).map_err(|e| InputError::core("/algebroid", e))?;
        algebroids.insert("algebroid".into(), g);
    }
    if let (Some(alg), Some(fields)) = (&spec.lie_algebra, &spec.action_fields) {
        let f = cx.rows(fields, n, "/action_fields")?;
        let model = lie_algebra(alg, f.len(), "/lie_algebra")?;
        let fields: Vec<Section> = f.into_iter().map(Section).collect();
        let g = build_action_algebroid(chart.clone(), &model, &fields).map_err(|e| InputError::core("/action_fields", e))?;
        algebroids.insert("action".into(), g);
    }
    let mut poisson = None;
    if let Some(p) = &spec.poisson {
        let m = cx.table(p, n, n, "/poisson")?;
        let pi = TensorField::new(vec![Slot::UP_TM, Slot::UP_TM], vec![n, n], m.into_iter().flatten().collect())
            .map_err(|e| InputError::core("/poisson", e))?;
        let g = build_poisson_algebroid(chart.clone(), &pi).map_err(|e| InputError::core("/poisson", e))?;
        algebroids.insert("poisson".into(), g);
        poisson = Some(pi);
    }
    if let Some(frame) = &spec.foliation_frame {
        let f = cx.rows(frame, n, "/foliation_frame")?;
        let fields: Vec<Section> = f.into_iter().map(Section).collect();
        let g = build_foliation_algebroid(chart.clone(), &fields).map_err(|e| InputError::core("/foliation_frame", e))?;
        algebroids.insert("foliation".into(), g);
    }

    let mut metric = None;
    if let Some(m) = &spec.metric {
        let s = cx.table(m, n, n, "/metric")?;
        let sigma = TensorField::new(vec![Slot::LOW_TM, Slot::LOW_TM], vec![n, n], s.into_iter().flatten().collect())
            .map_err(|e| InputError::core("/metric", e))?;
        let h_frame = match &spec.h_frame {
            Some(h) => {
                if h.is_empty() {
                    return Err(InputError::new("/h_frame", "at least one endomorphism field is required"));
                }
                Some(cx.table3(h, [h.len(), n, n], "/h_frame")?)
            }
            None => None,
        };
        let killing = match &spec.killing_fields {
            Some(k) => cx.rows(k, n, "/killing_fields")?.into_iter().map(Section).collect(),
            None => Vec::new(),
        };
        metric = Some(MetricData { sigma, h_frame, killing });
    }

    let mut parallelism = None;
    if let Some(p) = &spec.parallelism {
        let model = lie_algebra(&p.model, n, "/parallelism/model")?;
        let omega = cx.table(&p.omega, n, n, "/parallelism/omega")?;
        parallelism = Some(Parallelism::new(chart.clone(), model, omega).map_err(|e| InputError::core("/parallelism/omega", e))?);
    }

    let mut connections = Vec::new();
    for (name, c) in &spec.connections {
        let path = format!("/connections/{}", name.replace('~', "~0").replace('/', "~1"));
        let g = algebroids.get(&c.on).ok_or_else(|| {
            let known: Vec<&str> = ALGEBROID_NAMES.iter().copied().filter(|k| algebroids.contains_key(*k)).collect();
            InputError::new(format!("{}/on", path), format!("unresolved algebroid `{}` (declared: {})", c.on, known.join(", ")))
        })?;
        let r = g.rank();
        let gamma = cx.table3(&c.gamma, [n, r, r], &format!("{}/gamma", path))?;
        let conn = TMConnection::new(Bundle::Algebroid, gamma).map_err(|e| InputError::core(&path, e))?;
        connections.push(NamedConnection { name: name.clone(), on: c.on.clone(), conn });
    }

    Ok(Geometry { spec: spec.clone(), chart, algebroids, connections, poisson, metric, parallelism })
}
