//! Plain-text field and trajectory files.
//!
//! `QNSF1 ndims res.. L` followed by row-major node values, one innermost
//! row per line; vector fields put a `component j` line before each
//! component block. `QNST1 n` carries `n` blocks of a `t <value>` line and
//! an embedded field, in mesh order (latest time first).

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::spaces::TimeMesh;
use crate::spectral::{Grid, ScalarField, VectorField};
use crate::trajectory::{Frame, Trajectory};

/// Numbers in output files: 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn write_values(out: &mut String, f: &ScalarField) {
    let res = f.grid().resolution();
    for row in f.values().chunks(res) {
        let line: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

fn header(grid: &Grid) -> String {
    let res: Vec<String> = (0..grid.n_dims()).map(|_| grid.resolution().to_string()).collect();
    format!("QNSF1 {} {} {}\n", grid.n_dims(), res.join(" "), fmt_num(grid.box_length()))
}

/// Text of one field block.
pub fn field_to_string(frame: &Frame) -> String {
    let mut out = header(frame.grid());
    match frame {
        Frame::Scalar(f) => write_values(&mut out, f),
        Frame::Vector(u) => {
            for (j, c) in u.components().iter().enumerate() {
                writeln!(out, "component {j}").expect("string write");
                write_values(&mut out, c);
            }
        }
    }
    out
}

pub fn write_field(w: &mut impl Write, frame: &Frame) -> Result<()> {
    w.write_all(field_to_string(frame).as_bytes())?;
    Ok(())
}

pub fn write_trajectory(w: &mut impl Write, g: &Trajectory) -> Result<()> {
    let mut out = format!("QNST1 {}\n", g.len());
    for (t, fr) in g.times().iter().zip(g.frames()) {
        writeln!(out, "t {}", fmt_num(*t)).expect("string write");
        out.push_str(&field_to_string(fr));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    peeked: Option<String>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self { inner: r.lines(), peeked: None, line_no: 0 }
    }

    fn peek(&mut self) -> Result<Option<&str>> {
        if self.peeked.is_none() {
            loop {
                match self.inner.next() {
                    None => break,
                    Some(l) => {
                        self.line_no += 1;
                        let l = l?;
                        if !l.trim().is_empty() {
                            self.peeked = Some(l);
                            break;
                        }
                    }
                }
            }
        }
        Ok(self.peeked.as_deref())
    }

    fn next_line(&mut self, what: &str) -> Result<String> {
        self.peek()?;
        match self.peeked.take() {
            Some(l) => Ok(l),
            None => parse_err(format!("unexpected end of file, expected {what}")),
        }
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse(format!("line {line}: bad number {tok:?}")))
}

fn read_values<R: BufRead>(lines: &mut Lines<R>, count: usize) -> Result<Vec<f64>> {
    let mut vals = Vec::with_capacity(count);
    while vals.len() < count {
        let l = lines.next_line("node values")?;
        for tok in l.split_whitespace() {
            vals.push(parse_f64(tok, lines.line_no)?);
        }
    }
    if vals.len() != count {
        return parse_err(format!("line {}: block has more than {count} values", lines.line_no));
    }
    Ok(vals)
}

fn read_block<R: BufRead>(lines: &mut Lines<R>) -> Result<Frame> {
    let head = lines.next_line("QNSF1 header")?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.first() != Some(&"QNSF1") || toks.len() < 4 {
        return parse_err(format!("line {}: expected `QNSF1 ndims res.. L`", lines.line_no));
    }
    let n: usize = toks[1].parse().map_err(|_| Error::Parse(format!("bad ndims {:?}", toks[1])))?;
    if toks.len() != n + 3 {
        return parse_err(format!("line {}: header needs {n} resolutions and L", lines.line_no));
    }
    let res: Vec<usize> = toks[2..2 + n]
        .iter()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad resolution {t:?}"))))
        .collect::<Result<_>>()?;
    if res.iter().any(|&r| r != res[0]) {
        return parse_err(format!("anisotropic resolutions {res:?} are not supported"));
    }
    let l = parse_f64(toks[n + 2], lines.line_no)?;
    let grid = Grid::new(n, res[0], l)?;
    if lines.peek()?.is_some_and(|s| s.starts_with("component")) {
        let mut comps = Vec::new();
        while let Some(s) = lines.peek()? {
            let expect = format!("component {}", comps.len());
            if s.trim() != expect {
                break;
            }
            lines.next_line("component")?;
            comps.push(ScalarField::from_values(grid.clone(), read_values(lines, grid.len())?)?);
        }
        if comps.len() != n {
            return parse_err(format!("vector field has {} components, expected {n}", comps.len()));
        }
        Ok(Frame::Vector(VectorField::new(comps)?))
    } else {
        Ok(Frame::Scalar(ScalarField::from_values(grid.clone(), read_values(lines, grid.len())?)?))
    }
}

pub fn read_field(r: impl BufRead) -> Result<Frame> {
    let mut lines = Lines::new(r);
    let f = read_block(&mut lines)?;
    if lines.peek()?.is_some() {
        return parse_err(format!("line {}: trailing content after field", lines.line_no));
    }
    Ok(f)
}

/// Reads a trajectory; the mesh is recovered from the sample times, which
/// must form a geometric sequence.
pub fn read_trajectory(r: impl BufRead) -> Result<Trajectory> {
    let mut lines = Lines::new(r);
    let head = lines.next_line("QNST1 header")?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "QNST1" {
        return parse_err("expected `QNST1 n_nodes`");
    }
    let count: usize = toks[1].parse().map_err(|_| Error::Parse(format!("bad node count {:?}", toks[1])))?;
    if count == 0 {
        return parse_err("trajectory without nodes");
    }
    let mut times = Vec::with_capacity(count);
    let mut frames = Vec::with_capacity(count);
    for _ in 0..count {
        let l = lines.next_line("time line")?;
        let t = match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["t", v] => parse_f64(v, lines.line_no)?,
            _ => return parse_err(format!("line {}: expected `t <value>`", lines.line_no)),
        };
        times.push(t);
        frames.push(read_block(&mut lines)?);
    }
    if lines.peek()?.is_some() {
        return parse_err("trailing content after trajectory");
    }
    let ratio = if count > 1 { times[1] / times[0] } else { std::f64::consts::FRAC_1_SQRT_2 };
    let mesh = TimeMesh::new(times[0] / ratio.sqrt(), ratio, count)?;
    for (k, t) in times.iter().enumerate() {
        if (mesh.sample(k) - t).abs() > 1e-12 * t {
            return parse_err(format!("sample times are not geometric at node {k}"));
        }
    }
    Trajectory::new(mesh, frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip_is_exact() {
        let g = Grid::new(2, 16, 2.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| (x[0] * 1.3).sin() / 3.0 + x[1]);
        let back = read_field(field_to_string(&Frame::Scalar(f.clone())).as_bytes()).unwrap();
        assert_eq!(back.as_scalar().unwrap().values(), f.values());
        assert_eq!(back.grid(), &g);
        let u = VectorField::new(vec![f.clone(), f.scaled(-1.0)]).unwrap();
        let back = read_field(field_to_string(&Frame::Vector(u.clone())).as_bytes()).unwrap();
        assert_eq!(back.as_vector().unwrap().component(1).values(), u.component(1).values());
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(read_field("QNSF1 2 16 1.0\n1 2 3\n".as_bytes()).is_err());
        assert!(read_field("QNSF 2 16 16 1.0\n".as_bytes()).is_err());
        assert!(read_field("QNSF1 2 16 32 1.0\n".as_bytes()).is_err());
    }

    #[test]
    fn trajectory_round_trip() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let mesh = TimeMesh::new(0.01, 0.5, 4).unwrap();
        let f = ScalarField::from_fn(&g, |x| (std::f64::consts::TAU * x[0]).cos());
        let tr = Trajectory::heat_flow(&f, &mesh).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &tr).unwrap();
        let back = read_trajectory(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back.max_abs_diff(&tr), 0.0);
        assert!((back.mesh().t_cap() - 0.01).abs() < 1e-15);
    }
}
