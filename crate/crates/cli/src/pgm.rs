//! Grayscale PGM images, plain (`P2`) and raw (`P5`), 8 or 16 bits.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Plain,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub format: PgmFormat,
    /// Row-major samples in `0..=maxval`.
    pub samples: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmError(pub String);

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a valid PGM image: {}", self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, PgmError> {
    Err(PgmError(msg.into()))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(format!("expected {what}"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError(format!("{what} is out of range")))
    }
}

impl GrayImage {
    pub fn decode(data: &[u8]) -> Result<Self, PgmError> {
        let format = match data.get(..2) {
            Some(b"P2") => PgmFormat::Plain,
            Some(b"P5") => PgmFormat::Raw,
            _ => return err("missing P2 or P5 magic number"),
        };
        let mut c = Cursor { data, pos: 2 };
        let width = c.number("width")? as usize;
        let height = c.number("height")? as usize;
        let maxval = c.number("maxval")?;
        if width == 0 || height == 0 {
            return err("width and height must be positive");
        }
        if maxval == 0 || maxval > 65535 {
            return err("maxval must lie in 1..=65535");
        }
        let maxval = maxval as u16;
        let count = width
            .checked_mul(height)
            .ok_or_else(|| PgmError("image dimensions overflow".into()))?;
        let mut samples = Vec::with_capacity(count);
        match format {
            PgmFormat::Plain => {
                for i in 0..count {
                    let v = c.number(&format!("sample {i}"))?;
                    samples.push(v.min(maxval as u64) as u16);
                }
            }
            PgmFormat::Raw => {
                // Exactly one whitespace byte separates the header from the raster.
                if !c.data.get(c.pos).is_some_and(|b| b.is_ascii_whitespace()) {
                    return err("missing whitespace after maxval");
                }
                c.pos += 1;
                let wide = maxval > 255;
                let need = count * if wide { 2 } else { 1 };
                let raster = c
                    .data
                    .get(c.pos..c.pos + need)
                    .ok_or_else(|| PgmError(format!("raster truncated: expected {need} bytes")))?;
                if wide {
                    samples.extend(
                        raster
                            .chunks_exact(2)
                            .map(|b| u16::from_be_bytes([b[0], b[1]]).min(maxval)),
                    );
                } else {
                    samples.extend(raster.iter().map(|&b| (b as u16).min(maxval)));
                }
            }
        }
        Ok(Self {
            width,
            height,
            maxval,
            format,
            samples,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = match self.format {
            PgmFormat::Plain => "P2",
            PgmFormat::Raw => "P5",
        };
        let mut out = format!("{magic}\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        match self.format {
            PgmFormat::Plain => {
                for row in self.samples.chunks(self.width) {
                    // Keep lines well under 70 characters.
                    for chunk in row.chunks(12) {
                        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                        out.extend_from_slice(line.join(" ").as_bytes());
                        out.push(b'\n');
                    }
                }
            }
            PgmFormat::Raw => {
                if self.maxval > 255 {
                    for v in &self.samples {
                        out.extend_from_slice(&v.to_be_bytes());
                    }
                } else {
                    out.extend(self.samples.iter().map(|&v| v as u8));
                }
            }
        }
        out
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Samples scaled to `[0, 1]`.
    pub fn to_unit(&self) -> Vec<f64> {
        let m = self.maxval as f64;
        self.samples.iter().map(|&v| v as f64 / m).collect()
    }

    /// Quantizes `[0, 1]` values, clamping anything outside.
    pub fn from_unit(
        width: usize,
        height: usize,
        values: &[f64],
        maxval: u16,
        format: PgmFormat,
    ) -> Self {
        let m = maxval as f64;
        Self {
            width,
            height,
            maxval,
            format,
            samples: values
                .iter()
                .map(|&v| {
                    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
                    (v * m).round() as u16
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_with_comments() {
        let img = GrayImage::decode(b"P2\n# a comment\n3 2\n# another\n10\n0 5 10\n3 4 99\n").unwrap();
        assert_eq!((img.width, img.height, img.maxval), (3, 2, 10));
        assert_eq!(img.samples, vec![0, 5, 10, 3, 4, 10]);
        assert_eq!(img.format, PgmFormat::Plain);
    }

    #[test]
    fn round_trips() {
        for (format, maxval) in [
            (PgmFormat::Plain, 255),
            (PgmFormat::Raw, 255),
            (PgmFormat::Raw, 1000),
            (PgmFormat::Plain, 65535),
        ] {
            let samples: Vec<u16> = (0..35).map(|i| (i * 7919 % (maxval as u32 + 1)) as u16).collect();
            let img = GrayImage {
                width: 7,
                height: 5,
                maxval,
                format,
                samples,
            };
            let back = GrayImage::decode(&img.encode()).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(GrayImage::decode(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(GrayImage::decode(b"P5\n2 2\n255\n\0").is_err());
        assert!(GrayImage::decode(b"P2\n0 2\n255\n").is_err());
        assert!(GrayImage::decode(b"P2\n1 1\n70000\n1").is_err());
        assert!(GrayImage::decode(b"").is_err());
    }

    #[test]
    fn unit_scaling() {
        let img = GrayImage::from_unit(2, 1, &[0.5, 1.7], 255, PgmFormat::Raw);
        assert_eq!(img.samples, vec![128, 255]);
        assert_eq!(img.to_unit()[1], 1.0);
    }
}
