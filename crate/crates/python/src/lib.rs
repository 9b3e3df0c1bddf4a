//! Python bindings. Integers cross the boundary as Python ints, certificates
//! as plain dicts built from the JSON the CLI prints.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rug::Integer;

use cubic_thue::cli::verify_checks;
use cubic_thue::config::Config;
use cubic_thue::family::{example_family, FamilyRecord, FormFamily};
use cubic_thue::solver::{brute_force_oracle, solve_box, SearchSpec};
use cubic_thue::tracer::{trace_solution, TracerError};

fn to_integer(v: &Bound<'_, PyAny>) -> PyResult<Integer> {
    let s = v.str()?.to_string();
    s.parse::<Integer>()
        .map_err(|_| PyValueError::new_err(format!("not an integer: {s}")))
}

fn to_py_int<'py>(py: Python<'py>, v: &Integer) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?.getattr("int")?.call1((v.to_string(),))
}

fn from_json<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((v.to_string(),))
}

/// One member of a family of binary cubic forms `F_n`.
#[pyclass(name = "Family", module = "cubic_thue", frozen)]
struct PyFamily {
    inner: FormFamily,
}

#[pymethods]
impl PyFamily {
    /// The example family for parameter `D >= 1`.
    #[new]
    fn new(d: i64) -> PyResult<Self> {
        let inner = example_family(d).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyFamily { inner })
    }

    /// Family from the JSON record format used by `--family-file`.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let rec: FamilyRecord = serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let inner = FormFamily::from_record(&rec).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyFamily { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_record()).expect("record serializes")
    }

    /// Coefficients `(a0, a1, a2, a3)` of `F_n`.
    fn form<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let f = self.inner.form_at(n);
        f.a.iter().map(|c| to_py_int(py, c)).collect()
    }

    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        n: i64,
        x: &Bound<'py, PyAny>,
        y: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let v = self.inner.form_at(n).evaluate(&to_integer(x)?, &to_integer(y)?);
        to_py_int(py, &v)
    }

    fn is_degenerate(&self, n: i64) -> bool {
        self.inner.is_degenerate(n)
    }

    /// Nontrivial solutions of `0 < |F_n(x, y)| <= k` with `n_lo <= n <= n_hi`
    /// and `|y| <= y_max`, as `(n, x, y, value)` tuples.
    #[pyo3(signature = (k, n_lo=-8, n_hi=8, y_max=1000, oracle=false))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        k: i64,
        n_lo: i64,
        n_hi: i64,
        y_max: u64,
        oracle: bool,
    ) -> PyResult<Vec<Bound<'py, PyAny>>> {
        if k < 0 || n_lo > n_hi {
            return Err(PyValueError::new_err("need k >= 0 and n_lo <= n_hi"));
        }
        let spec = SearchSpec::new(k, n_lo, n_hi, y_max);
        let fam = &self.inner;
        let recs = py.detach(|| if oracle { brute_force_oracle(fam, &spec) } else { solve_box(fam, &spec) });
        recs.iter()
            .map(|r| {
                let t = (r.n, to_py_int(py, &r.x)?, to_py_int(py, &r.y)?, to_py_int(py, &r.value)?);
                Ok(t.into_pyobject(py)?.into_any())
            })
            .collect()
    }

    /// Certificate for a solution, as a dict.
    #[pyo3(signature = (n, x, y, k=None, precision=None))]
    fn trace<'py>(
        &self,
        py: Python<'py>,
        n: i64,
        x: &Bound<'py, PyAny>,
        y: &Bound<'py, PyAny>,
        k: Option<&Bound<'py, PyAny>>,
        precision: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut cfg = Config::default();
        if let Some(p) = precision {
            cfg.precision = p;
        }
        cfg.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
        let (x, y) = (to_integer(x)?, to_integer(y)?);
        let k = k.map(to_integer).transpose()?;
        let fam = &self.inner;
        let cert = py
            .detach(|| trace_solution(fam, n, &x, &y, k.as_ref(), &cfg))
            .map_err(|e| match e {
                TracerError::PrecisionExhausted { .. } => PyArithmeticError::new_err(e.to_string()),
                _ => PyValueError::new_err(e.to_string()),
            })?;
        from_json(py, &cert.to_json())
    }

    /// Runs the self-checks and returns one dict per check, stopping at the
    /// first failure.
    #[pyo3(signature = (deep=false))]
    fn verify<'py>(&self, py: Python<'py>, deep: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mut out = Vec::new();
        for c in verify_checks(&self.inner, deep) {
            let d = PyDict::new(py);
            d.set_item("check", c.name)?;
            d.set_item("pass", c.pass)?;
            d.set_item("informational", c.informational)?;
            d.set_item("detail", &c.detail)?;
            out.push(d);
            if !c.pass && !c.informational {
                break;
            }
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        match self.inner.example_d() {
            Some(d) => format!("Family(D={d})"),
            None => format!("Family.from_json({:?})", self.to_json()),
        }
    }
}

#[pymodule]
#[pyo3(name = "cubic_thue")]
fn cubic_thue_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    Ok(())
}
