//! Analytic ellipse phantoms with closed-form Radon transforms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A uniformly weighted ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: (f64, f64),
    pub semi_axes: (f64, f64),
    /// Counter-clockwise rotation of the first semi-axis, in radians.
    pub rotation: f64,
    pub intensity: f64,
}

impl Ellipse {
    pub fn new(center: (f64, f64), semi_axes: (f64, f64), rotation: f64, intensity: f64) -> Result<Self> {
        let e = Ellipse {
            center,
            semi_axes,
            rotation,
            intensity,
        };
        e.validate()?;
        Ok(e)
    }

    /// Checks positive axes and containment in the closed unit disk.
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.semi_axes;
        let finite = [self.center.0, self.center.1, a, b, self.rotation, self.intensity]
            .iter()
            .all(|v| v.is_finite());
        if !finite || a <= 0.0 || b <= 0.0 {
            return Err(Error::Domain(format!("invalid ellipse {self:?}")));
        }
        // An ellipse lies in the unit disk iff its support function is at most one.
        let reach = (0..3600)
            .map(|i| {
                let theta = PI * i as f64 / 1800.0;
                self.offset(theta) + self.half_width(theta)
            })
            .fold(f64::MIN, f64::max);
        if reach > 1.0 + 1e-9 {
            return Err(Error::Domain(format!(
                "ellipse {self:?} leaves the unit disk (reach {reach})"
            )));
        }
        Ok(())
    }

    /// Projection of the center onto direction `theta`.
    #[inline]
    fn offset(&self, theta: f64) -> f64 {
        self.center.0 * theta.cos() + self.center.1 * theta.sin()
    }

    /// Half chord extent `s(θ) = sqrt(a² cos²(θ-φ) + b² sin²(θ-φ))`.
    #[inline]
    fn half_width(&self, theta: f64) -> f64 {
        let (a, b) = self.semi_axes;
        let g = theta - self.rotation;
        ((a * g.cos()).powi(2) + (b * g.sin()).powi(2)).sqrt()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (a, b) = self.semi_axes;
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        let (s, c) = self.rotation.sin_cos();
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u / a).powi(2) + (v / b).powi(2) <= 1.0
    }

    /// Line integral of the weighted indicator along `⟨x, θ⟩ = t`.
    pub fn radon(&self, theta: f64, t: f64) -> f64 {
        let s = self.half_width(theta);
        let tau = t - self.offset(theta);
        if tau.abs() >= s {
            return 0.0;
        }
        let (a, b) = self.semi_axes;
        self.intensity * 2.0 * a * b * (s * s - tau * tau).sqrt() / (s * s)
    }

    /// Fourier transform in `t` of the projection at angle `theta`:
    /// `2π a b μ J1(sω)/(sω) e^{-iωc}`.
    pub fn projection_spectrum(&self, theta: f64, omega: f64) -> Complex64 {
        let (a, b) = self.semi_axes;
        let s = self.half_width(theta);
        let c = self.offset(theta);
        let x = s * omega;
        let jinc = if x.abs() < 1e-8 { 0.5 - x * x / 16.0 } else { libm::j1(x) / x };
        let (sin, cos) = (omega * c).sin_cos();
        2.0 * PI * a * b * self.intensity * jinc * Complex64::new(cos, -sin)
    }

    /// Total mass `π a b μ`.
    pub fn mass(&self) -> f64 {
        PI * self.semi_axes.0 * self.semi_axes.1 * self.intensity
    }
}

/// Line integral of an ellipse's weighted indicator.
pub fn radon_ellipse(e: &Ellipse, theta: f64, t: f64) -> f64 {
    e.radon(theta, t)
}

/// Sum of weighted ellipses supported in the unit disk.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Phantom {
    pub ellipses: Vec<Ellipse>,
}

impl Phantom {
    pub fn new(ellipses: Vec<Ellipse>) -> Result<Self> {
        for e in &ellipses {
            e.validate()?;
        }
        Ok(Phantom { ellipses })
    }

    pub fn empty() -> Self {
        Phantom::default()
    }

    pub fn radon(&self, theta: f64, t: f64) -> f64 {
        self.ellipses.iter().map(|e| e.radon(theta, t)).sum()
    }

    pub fn projection_spectrum(&self, theta: f64, omega: f64) -> Complex64 {
        self.ellipses
            .iter()
            .map(|e| e.projection_spectrum(theta, omega))
            .sum()
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.ellipses
            .iter()
            .filter(|e| e.contains(x, y))
            .map(|e| e.intensity)
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.ellipses.iter().map(Ellipse::mass).sum()
    }

    /// Same geometry with every intensity multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Phantom {
        Phantom {
            ellipses: self
                .ellipses
                .iter()
                .map(|e| Ellipse {
                    intensity: e.intensity * factor,
                    ..*e
                })
                .collect(),
        }
    }

    /// Pixel-center sampling of the density on `grid`'s geometry.
    pub fn rasterize(&self, grid: &ImageGrid) -> ImageGrid {
        let mut out = ImageGrid::new(grid.width(), grid.height()).expect("grid dimensions already valid");
        for i in 0..grid.height() {
            for j in 0..grid.width() {
                let (x, y) = grid.pixel_center(i, j);
                out.set(i, j, self.density(x, y));
            }
        }
        out
    }

    /// Parses the plain-text table: one ellipse per line with columns
    /// `cx cy a b rot_deg intensity`, separated by whitespace or commas.
    /// Blank lines and `#` comments are skipped.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut ellipses = Vec::new();
        for (row, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 6 {
                return Err(Error::parse(
                    row + 1,
                    fields.len().min(6) + 1,
                    format!("expected 6 columns, found {}", fields.len()),
                ));
            }
            let mut v = [0.0; 6];
            for (col, f) in fields.iter().enumerate() {
                v[col] = f
                    .parse()
                    .map_err(|_| Error::parse(row + 1, col + 1, format!("not a number: {f:?}")))?;
            }
            let e = Ellipse::new((v[0], v[1]), (v[2], v[3]), v[4].to_radians(), v[5])
                .map_err(|err| Error::parse(row + 1, 1, err.to_string()))?;
            ellipses.push(e);
        }
        Ok(Phantom { ellipses })
    }

    pub fn to_table(&self) -> String {
        let mut s = String::from("# cx cy a b rot_deg intensity\n");
        for e in &self.ellipses {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {}",
                e.center.0,
                e.center.1,
                e.semi_axes.0,
                e.semi_axes.1,
                e.rotation.to_degrees(),
                e.intensity
            );
        }
        s
    }
}

/// Line integral of a phantom: sum over its ellipses.
pub fn radon_phantom(p: &Phantom, theta: f64, t: f64) -> f64 {
    p.radon(theta, t)
}

/// Modified-contrast Shepp-Logan table (Toft), columns
/// `(intensity, a, b, cx, cy, rot_deg)`.
pub const SHEPP_LOGAN_TABLE: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0],
    [-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0],
    [-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0],
    [0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0],
    [0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0],
    [0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0],
    [0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0],
];

/// The ten-ellipse Shepp-Logan head phantom with gray levels in `[0, 1]`.
pub fn shepp_logan() -> Phantom {
    table_phantom(&SHEPP_LOGAN_TABLE)
}

/// A nut-shaped object: dense shell, hollow interior and two kernel halves
/// split by a thin septum. Stand-in for measured walnut data.
pub const WALNUT_TABLE: [[f64; 6]; 7] = [
    [1.0, 0.62, 0.76, 0.0, 0.0, 12.0],
    [-0.75, 0.56, 0.70, 0.0, 0.0, 12.0],
    [0.45, 0.22, 0.52, -0.21, 0.02, 18.0],
    [0.45, 0.22, 0.52, 0.23, -0.03, 6.0],
    [-0.25, 0.08, 0.26, -0.20, 0.05, 18.0],
    [-0.25, 0.08, 0.26, 0.22, 0.0, 6.0],
    [0.3, 0.025, 0.64, 0.01, 0.0, 12.0],
];

pub fn walnut_standin() -> Phantom {
    table_phantom(&WALNUT_TABLE)
}

fn table_phantom(rows: &[[f64; 6]]) -> Phantom {
    Phantom::new(
        rows.iter()
            .map(|r| Ellipse::new((r[3], r[4]), (r[1], r[2]), r[5].to_radians(), r[0]))
            .collect::<Result<Vec<_>>>()
            .expect("built-in table is valid"),
    )
    .expect("built-in table is valid")
}

/// Row-major image on `[-1, 1]²`; row 0 is the top edge (`y = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain(format!("empty image grid {width}x{height}")));
        }
        Ok(ImageGrid {
            width,
            height,
            pixels: vec![0.0; width * height],
        })
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::Size(format!(
                "{} pixels do not fill a {width}x{height} grid",
                pixels.len()
            )));
        }
        Ok(ImageGrid {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.pixels[row * self.width + col] = v;
    }

    /// Center of pixel `(row, col)` in world coordinates.
    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        let x = -1.0 + (col as f64 + 0.5) * 2.0 / self.width as f64;
        let y = 1.0 - (row as f64 + 0.5) * 2.0 / self.height as f64;
        (x, y)
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.pixels.iter().copied().fold(f64::MAX, f64::min)
    }
}
