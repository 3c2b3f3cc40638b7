use super::matrix::Matrix;
use super::split::SplitMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Wire form of a complex matrix: row-major nested arrays, `im` optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub m: usize,
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_split<T: Real>(a: &SplitMatrix<T>) -> Self {
        let a = a.cast::<f64>();
        MatrixJson {
            m: a.rows(),
            n: a.cols(),
            re: a.re.to_rows(),
            im: Some(a.im.to_rows()),
        }
    }

    pub fn to_split<T: Real>(&self) -> Result<SplitMatrix<T>> {
        let check = |rows: &Vec<Vec<f64>>, what: &str| -> Result<Matrix<f64>> {
            let mat = Matrix::from_rows(rows)?;
            if mat.shape() != (self.m, self.n) {
                return Err(Error::DimensionMismatch(format!(
                    "{what} is {}x{}, header says {}x{}",
                    mat.rows(),
                    mat.cols(),
                    self.m,
                    self.n
                )));
            }
            if !mat.is_finite() {
                return Err(Error::NonFinite(what.to_string()));
            }
            Ok(mat)
        };
        if self.m == 0 || self.n == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let re = check(&self.re, "re")?;
        let im = match &self.im {
            Some(rows) => check(rows, "im")?,
            None => Matrix::zeros(self.m, self.n),
        };
        Ok(SplitMatrix::new(re, im)?.cast())
    }

    pub fn parse<T: Real>(text: &str) -> Result<SplitMatrix<T>> {
        let j: MatrixJson = serde_json::from_str(text)?;
        j.to_split()
    }
}
