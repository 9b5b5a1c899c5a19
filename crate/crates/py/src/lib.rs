use pyo3::prelude::*;

#[pymodule]
fn ellax_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
