//! Netpbm (PGM/PPM) and PFM codecs.
//!
//! Header grammar accepted by the decoder:
//!
//! ```text
//! pnm    := magic ws width ws height ws maxval single-ws raster
//! pfm    := ("Pf" | "PF") ws width ws height ws scale single-ws raster
//! magic  := "P2" | "P3" | "P5" | "P6"
//! ws     := (whitespace | "#" comment-to-end-of-line)+
//! ```
//!
//! `maxval` ranges over `1..=65535`; binary rasters use one byte per sample
//! below 256 and two big-endian bytes otherwise. Samples are divided by
//! `maxval`. PFM rasters are 32-bit floats stored bottom row first; a negative
//! scale marks little-endian data. Writers emit binary P5/P6 with maxval 255
//! (clamp, then round half up) and little-endian PFM with scale `-1.0`.

use std::fs;
use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

/// On-disk image formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Pgm,
    Ppm,
    PgmAscii,
    PpmAscii,
    Pfm,
}

impl Format {
    /// Format implied by a file extension (`pgm`, `ppm`, `pfm`).
    pub fn from_path(path: &Path) -> Result<Format> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(Format::Pgm),
            Some("ppm") => Ok(Format::Ppm),
            Some("pfm") => Ok(Format::Pfm),
            _ => Err(Error::Format {
                path: path.to_path_buf(),
                message: "expected a .pgm, .ppm or .pfm extension".into(),
            }),
        }
    }

    fn channels(self) -> Option<usize> {
        match self {
            Format::Pgm | Format::PgmAscii => Some(1),
            Format::Ppm | Format::PpmAscii => Some(3),
            Format::Pfm => None,
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) -> Result<()> {
        let start = self.pos;
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        if self.pos == start {
            return Err(Error::decode(self.pos, "expected whitespace"));
        }
        Ok(())
    }

    fn token(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while let Some(b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || *b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            let msg = if start >= self.bytes.len() {
                "unexpected end of header"
            } else {
                "expected a header field"
            };
            return Err(Error::decode(start, msg));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::decode(start, "header field is not ASCII"))
    }

    fn unsigned(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        let tok = self.token()?;
        tok.parse::<usize>()
            .map_err(|_| Error::decode(start, format!("invalid {what} {tok:?}")))
    }

    /// Consumes exactly one whitespace byte separating header and raster.
    fn single_ws(&mut self) -> Result<()> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::decode(self.pos, "expected whitespace before raster")),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::decode(
                self.bytes.len(),
                format!(
                    "truncated raster: need {n} bytes from offset {}, have {}",
                    self.pos,
                    self.bytes.len() - self.pos
                ),
            )),
        }
    }
}

/// Decodes a PGM, PPM or PFM byte stream.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 {
        return Err(Error::decode(0, "missing magic number"));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    match &bytes[..2] {
        b"P2" => decode_pnm(&mut cur, 1, false),
        b"P3" => decode_pnm(&mut cur, 3, false),
        b"P5" => decode_pnm(&mut cur, 1, true),
        b"P6" => decode_pnm(&mut cur, 3, true),
        b"Pf" => decode_pfm(&mut cur, 1),
        b"PF" => decode_pfm(&mut cur, 3),
        _ => Err(Error::decode(0, "unknown magic number")),
    }
}

fn dimensions(cur: &mut Cursor<'_>) -> Result<(usize, usize)> {
    cur.skip_ws()?;
    let at = cur.pos;
    let width = cur.unsigned("width")?;
    cur.skip_ws()?;
    let height = cur.unsigned("height")?;
    if width == 0 || height == 0 {
        return Err(Error::decode(at, format!("empty image {width}x{height}")));
    }
    Ok((width, height))
}

fn decode_pnm(cur: &mut Cursor<'_>, channels: usize, binary: bool) -> Result<Image> {
    let (width, height) = dimensions(cur)?;
    cur.skip_ws()?;
    let maxval_at = cur.pos;
    let maxval = cur.unsigned("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(Error::decode(maxval_at, format!("unsupported maxval {maxval}")));
    }
    let count = width * height * channels;
    let scale = 1.0 / maxval as f64;
    let mut data = Vec::with_capacity(count);
    if binary {
        cur.single_ws()?;
        let wide = maxval > 255;
        let raster_at = cur.pos;
        let raw = cur.take(count * if wide { 2 } else { 1 })?;
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([raw[2 * i], raw[2 * i + 1]]) as usize
            } else {
                raw[i] as usize
            };
            if v > maxval {
                let off = raster_at + if wide { 2 * i } else { i };
                return Err(Error::decode(off, format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(v as f64 * scale);
        }
    } else {
        for _ in 0..count {
            cur.skip_ws()?;
            let at = cur.pos;
            let v = cur.unsigned("sample")?;
            if v > maxval {
                return Err(Error::decode(at, format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(v as f64 * scale);
        }
    }
    Image::new(width, height, channels, data)
}

fn decode_pfm(cur: &mut Cursor<'_>, channels: usize) -> Result<Image> {
    let (width, height) = dimensions(cur)?;
    cur.skip_ws()?;
    let scale_at = cur.pos;
    let tok = cur.token()?;
    let scale: f64 = tok
        .parse()
        .map_err(|_| Error::decode(scale_at, format!("invalid scale {tok:?}")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::decode(scale_at, "scale must be finite and non-zero"));
    }
    let little = scale < 0.0;
    cur.single_ws()?;
    let raster_at = cur.pos;
    let row_len = width * channels;
    let raw = cur.take(row_len * height * 4)?;
    let mut data = vec![0.0; row_len * height];
    for (i, chunk) in raw.chunks_exact(4).enumerate() {
        let word = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(word)
        } else {
            f32::from_be_bytes(word)
        };
        if !v.is_finite() {
            return Err(Error::decode(raster_at + 4 * i, "non-finite float sample"));
        }
        let file_row = i / row_len;
        let dst = (height - 1 - file_row) * row_len + i % row_len;
        data[dst] = v as f64;
    }
    Image::new(width, height, channels, data)
}

#[inline]
fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Encodes an image in the given format.
pub fn encode(img: &Image, format: Format) -> Result<Vec<u8>> {
    if let Some(expected) = format.channels() {
        if img.channels() != expected {
            return Err(Error::Channels {
                expected,
                actual: img.channels(),
            });
        }
    }
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::new();
    match format {
        Format::Pgm | Format::Ppm => {
            let magic = if format == Format::Pgm { "P5" } else { "P6" };
            out.extend_from_slice(format!("{magic}\n{w} {h}\n255\n").as_bytes());
            out.extend(img.data().iter().map(|&v| quantize(v)));
        }
        Format::PgmAscii | Format::PpmAscii => {
            let magic = if format == Format::PgmAscii { "P2" } else { "P3" };
            let mut text = format!("{magic}\n{w} {h}\n255\n");
            for row in img.data().chunks(w * img.channels()) {
                let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
                text.push_str(&line.join(" "));
                text.push('\n');
            }
            out.extend_from_slice(text.as_bytes());
        }
        Format::Pfm => {
            let magic = if img.channels() == 1 { "Pf" } else { "PF" };
            out.extend_from_slice(format!("{magic}\n{w} {h}\n-1.0\n").as_bytes());
            let row_len = w * img.channels();
            for row in img.data().chunks(row_len).rev() {
                for &v in row {
                    out.extend_from_slice(&(v as f32).to_le_bytes());
                }
            }
        }
    }
    Ok(out)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes)
}

/// Writes `img` in the format selected by the path's extension.
pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(img, Format::from_path(path)?)?;
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
