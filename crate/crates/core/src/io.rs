//! Line-oriented text format for states and operators.
//!
//! ```text
//! dims 2 2
//! amp 0 7.0710678118654757e-1 0.0000000000000000e0
//! amp 3 7.0710678118654757e-1 0.0000000000000000e0
//! ```
//!
//! Operators use `rho <row> <col> <re> <im>` records instead of `amp`.
//! Omitted entries are zero. Blank lines and lines starting with `#` are
//! ignored. Numbers are written with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, DensityOperator, HilbertStructure, RawVector, StateVector};

/// Parsed content of a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateRecord {
    Amplitudes(RawVector),
    Operator {
        structure: HilbertStructure,
        matrix: CMatrix,
    },
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn dims_line(structure: &HilbertStructure) -> String {
    let dims: Vec<String> = structure.dims().iter().map(ToString::to_string).collect();
    format!("dims {}\n", dims.join(" "))
}

pub fn format_amplitudes(structure: &HilbertStructure, amplitudes: &CVector) -> String {
    let mut out = dims_line(structure);
    for (i, a) in amplitudes.iter().enumerate() {
        if a.re != 0.0 || a.im != 0.0 {
            out.push_str(&format!(
                "amp {i} {} {}\n",
                format_number(a.re),
                format_number(a.im)
            ));
        }
    }
    out
}

pub fn format_state(state: &StateVector) -> String {
    format_amplitudes(state.structure(), state.amplitudes())
}

/// `rho` records for every non-zero entry, each prefixed by `prefix`.
pub fn format_matrix_records(matrix: &CMatrix, prefix: &str) -> String {
    let mut out = String::new();
    for r in 0..matrix.nrows() {
        for c in 0..matrix.ncols() {
            let a = matrix[(r, c)];
            if a.re != 0.0 || a.im != 0.0 {
                out.push_str(&format!(
                    "{prefix}rho {r} {c} {} {}\n",
                    format_number(a.re),
                    format_number(a.im)
                ));
            }
        }
    }
    out
}

pub fn format_operator(structure: &HilbertStructure, matrix: &CMatrix) -> String {
    let mut out = dims_line(structure);
    out.push_str(&format_matrix_records(matrix, ""));
    out
}

pub fn format_density(rho: &DensityOperator) -> String {
    format_operator(rho.structure(), rho.matrix())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))
}

fn parse_complex<'a>(line: usize, tokens: &mut impl Iterator<Item = &'a str>) -> Result<Complex64> {
    let re: f64 = parse_field(line, tokens.next(), "real part")?;
    let im: f64 = parse_field(line, tokens.next(), "imaginary part")?;
    if !re.is_finite() || !im.is_finite() {
        return Err(parse_err(line, "non-finite number"));
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_state_file(text: &str) -> Result<StateRecord> {
    let mut structure: Option<HilbertStructure> = None;
    let mut amplitudes: Option<CVector> = None;
    let mut matrix: Option<CMatrix> = None;
    let mut seen = HashSet::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().expect("non-empty line has a token");
        let Some(structure) = structure.as_ref() else {
            if keyword != "dims" {
                return Err(parse_err(line, "the first record must be 'dims'"));
            }
            let dims = tokens
                .map(|t| parse_field::<usize>(line, Some(t), "dimension"))
                .collect::<Result<Vec<_>>>()?;
            structure =
                Some(HilbertStructure::new(dims).map_err(|e| parse_err(line, e.to_string()))?);
            continue;
        };
        let n = structure.total_dim();
        match keyword {
            "amp" => {
                if matrix.is_some() {
                    return Err(parse_err(line, "'amp' and 'rho' records cannot be mixed"));
                }
                let i: usize = parse_field(line, tokens.next(), "flat index")?;
                if i >= n {
                    return Err(parse_err(line, format!("flat index {i} outside 0..{n}")));
                }
                let value = parse_complex(line, &mut tokens)?;
                if !seen.insert((i, 0)) {
                    return Err(parse_err(line, format!("duplicate entry for index {i}")));
                }
                amplitudes.get_or_insert_with(|| CVector::zeros(n))[i] = value;
            }
            "rho" => {
                if amplitudes.is_some() {
                    return Err(parse_err(line, "'amp' and 'rho' records cannot be mixed"));
                }
                let r: usize = parse_field(line, tokens.next(), "row")?;
                let c: usize = parse_field(line, tokens.next(), "column")?;
                if r >= n || c >= n {
                    return Err(parse_err(line, format!("entry ({r},{c}) outside {n}x{n}")));
                }
                let value = parse_complex(line, &mut tokens)?;
                if !seen.insert((r, c)) {
                    return Err(parse_err(line, format!("duplicate entry ({r},{c})")));
                }
                matrix.get_or_insert_with(|| CMatrix::zeros(n, n))[(r, c)] = value;
            }
            "dims" => return Err(parse_err(line, "repeated 'dims' record")),
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
        if tokens.next().is_some() {
            return Err(parse_err(line, "trailing fields"));
        }
    }

    let structure = structure.ok_or_else(|| parse_err(0, "missing 'dims' record"))?;
    match (amplitudes, matrix) {
        (Some(amplitudes), None) => Ok(StateRecord::Amplitudes(RawVector::new(
            structure, amplitudes,
        )?)),
        (None, Some(matrix)) => Ok(StateRecord::Operator { structure, matrix }),
        _ => Err(parse_err(0, "no 'amp' or 'rho' records")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bell_state_file() {
        let text =
            "# Bell state\ndims 2 2\namp 0 0.70710678118654752 0\n\namp 3 0.70710678118654752 0\n";
        let StateRecord::Amplitudes(raw) = parse_state_file(text).unwrap() else {
            panic!("expected amplitudes");
        };
        let psi = raw.normalize().unwrap();
        assert_eq!(psi.structure().dims(), &[2, 2]);
        assert_eq!(psi.amplitudes()[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn operator_file() {
        let text = "dims 2\nrho 0 0 1 0\n";
        let StateRecord::Operator { structure, matrix } = parse_state_file(text).unwrap() else {
            panic!("expected operator");
        };
        assert_eq!(structure.dims(), &[2]);
        assert_eq!(matrix[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(matrix[(1, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn malformed_files_are_rejected() {
        let cases = [
            "",
            "amp 0 1 0\n",
            "dims 2\n",
            "dims 1\namp 0 1 0\n",
            "dims 2\namp 2 1 0\n",
            "dims 2\namp 0 1\n",
            "dims 2\namp 0 1 0 9\n",
            "dims 2\namp 0 x 0\n",
            "dims 2\namp 0 1 0\namp 0 1 0\n",
            "dims 2\namp 0 1 0\nrho 0 0 1 0\n",
            "dims 2\nrho 0 2 1 0\n",
            "dims 2\nket 0 1 0\n",
            "dims 2\ndims 2\n",
            "dims 2\namp 0 NaN 0\n",
        ];
        for text in cases {
            assert!(
                matches!(
                    parse_state_file(text),
                    Err(Error::Parse { .. }) | Err(Error::StructureMismatch(_))
                ),
                "accepted {text:?}"
            );
        }
    }

    #[test]
    fn zero_entries_are_omitted() {
        let psi = StateVector::basis(HilbertStructure::new(vec![2, 3]).unwrap(), &[1, 2]).unwrap();
        assert_eq!(
            format_state(&psi),
            "dims 2 3\namp 5 1.0000000000000000e0 0.0000000000000000e0\n"
        );
    }

    proptest! {
        #[test]
        fn amplitudes_round_trip_bit_exactly(
            values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 6)
        ) {
            let structure = HilbertStructure::new(vec![2, 3]).unwrap();
            let amps = CVector::from_iterator(6, values.iter().map(|&(re, im)| Complex64::new(re, im)));
            let text = format_amplitudes(&structure, &amps);
            let StateRecord::Amplitudes(raw) = parse_state_file(&text).unwrap() else {
                panic!("expected amplitudes");
            };
            prop_assert_eq!(raw.amplitudes(), &amps);
        }

        #[test]
        fn operators_round_trip_bit_exactly(
            values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)
        ) {
            let structure = HilbertStructure::new(vec![2]).unwrap();
            let m = CMatrix::from_iterator(2, 2, values.iter().map(|&(re, im)| Complex64::new(re, im)));
            let text = format_operator(&structure, &m);
            let StateRecord::Operator { matrix, .. } = parse_state_file(&text).unwrap() else {
                panic!("expected operator");
            };
            prop_assert_eq!(matrix, m);
        }
    }
}
