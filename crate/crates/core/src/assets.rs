//! 128x128 8-bit test images embedded in the crate.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::image::{decode_pgm, Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Asset {
    /// Grayscale astronaut portrait, standing in for the usual portrait test image.
    Portrait,
    Cameraman,
    QrCode,
}

impl Asset {
    pub const ALL: [Asset; 3] = [Asset::Portrait, Asset::Cameraman, Asset::QrCode];

    pub fn name(&self) -> &'static str {
        match self {
            Asset::Portrait => "portrait",
            Asset::Cameraman => "cameraman",
            Asset::QrCode => "qrcode",
        }
    }

    pub fn pgm_bytes(&self) -> &'static [u8] {
        match self {
            Asset::Portrait => include_bytes!("../assets/portrait.pgm"),
            Asset::Cameraman => include_bytes!("../assets/cameraman.pgm"),
            Asset::QrCode => include_bytes!("../assets/qrcode.pgm"),
        }
    }

    pub fn load(&self) -> Image {
        decode_pgm(self.pgm_bytes()).expect("embedded assets are valid PGM")
    }
}

impl fmt::Display for Asset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Asset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "portrait" | "lena" => Ok(Asset::Portrait),
            "cameraman" => Ok(Asset::Cameraman),
            "qrcode" | "qr" => Ok(Asset::QrCode),
            _ => Err(format!("unknown asset {s:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assets_load() {
        for a in Asset::ALL {
            let img = a.load();
            assert_eq!((img.width(), img.height(), img.bit_depth()), (128, 128, 8));
            assert_eq!(a.name().parse::<Asset>().unwrap(), a);
        }
        let qr = Asset::QrCode.load();
        assert!(qr.pixels().iter().all(|&v| v == 0 || v == 255));
    }
}
