//! INI-style run configuration: `[section]` headers, `key = value` lines,
//! `#` comments. Unknown sections or keys are rejected with their line
//! number; every value is validated before any solve starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use reflector_core::blockage::{MaskPrimitive, MaskShape};
use reflector_core::scenario::BaselineParams;

#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    fn new(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = Result<T, ConfigError>;

/// Which feed model the run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum FeedChoice {
    CosQ,
    Gaussian,
    Tabulated {
        e_plane_csv: PathBuf,
        h_plane_csv: PathBuf,
    },
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario_ids: Vec<String>,
    pub params: BaselineParams,
    pub feed: FeedChoice,
    pub grid_n: usize,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub cut_points: usize,
    pub out_dir: PathBuf,
    pub extra_mask: Vec<MaskPrimitive>,
    pub sweep_parameter: Option<String>,
    pub sweep_values: Vec<f64>,
    /// FNV hash of the raw config bytes, echoed in provenance footers.
    pub config_hash: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario_ids: vec![
                "offset_fed".into(),
                "backfed_a".into(),
                "backfed_b".into(),
            ],
            params: BaselineParams::default(),
            feed: FeedChoice::CosQ,
            grid_n: 1024,
            theta_min_deg: -3.0,
            theta_max_deg: 3.0,
            cut_points: 1201,
            out_dir: PathBuf::from("out"),
            extra_mask: Vec::new(),
            sweep_parameter: None,
            sweep_values: Vec::new(),
            config_hash: 0,
        }
    }
}

struct RawSection {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

fn parse_sections(text: &str, path: &Path) -> ConfigResult<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = vec![RawSection {
        name: String::new(),
        line: 0,
        entries: Vec::new(),
    }];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(ConfigError::new(format!(
                    "{}:{}: malformed section header `{}`",
                    path.display(),
                    lineno,
                    line
                )));
            }
            sections.push(RawSection {
                name: line[1..line.len() - 1].trim().to_string(),
                line: lineno,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::new(format!(
                "{}:{}: expected `key = value`, got `{}`",
                path.display(),
                lineno,
                line
            )));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::new(format!(
                "{}:{}: empty key or value",
                path.display(),
                lineno
            )));
        }
        sections.last_mut().unwrap().entries.push((key, value, lineno));
    }
    if !sections[0].entries.is_empty() {
        let (key, _, line) = &sections[0].entries[0];
        return Err(ConfigError::new(format!(
            "{}:{}: key `{}` outside any [section]",
            path.display(),
            line,
            key
        )));
    }
    Ok(sections)
}

struct SectionReader<'a> {
    path: &'a Path,
    name: String,
    map: BTreeMap<String, (String, usize)>,
}

impl<'a> SectionReader<'a> {
    fn new(path: &'a Path, section: &RawSection) -> ConfigResult<Self> {
        let mut map = BTreeMap::new();
        for (k, v, line) in &section.entries {
            if map.insert(k.clone(), (v.clone(), *line)).is_some() {
                return Err(ConfigError::new(format!(
                    "{}:{}: duplicate key `{}` in [{}]",
                    path.display(),
                    line,
                    k,
                    section.name
                )));
            }
        }
        Ok(Self {
            path,
            name: section.name.clone(),
            map,
        })
    }

    fn take_f64(&mut self, key: &str) -> ConfigResult<Option<f64>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| {
                ConfigError::new(format!(
                    "{}:{}: `{}` is not a number: `{}`",
                    self.path.display(),
                    line,
                    key,
                    v
                ))
            }),
        }
    }

    fn take_usize(&mut self, key: &str) -> ConfigResult<Option<usize>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                ConfigError::new(format!(
                    "{}:{}: `{}` is not an integer: `{}`",
                    self.path.display(),
                    line,
                    key,
                    v
                ))
            }),
        }
    }

    fn take_string(&mut self, key: &str) -> Option<String> {
        self.map.remove(key).map(|(v, _)| v)
    }

    fn take_f64_list(&mut self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some((v, line)) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    out.push(part.trim().parse::<f64>().map_err(|_| {
                        ConfigError::new(format!(
                            "{}:{}: `{}` has a non-numeric item: `{}`",
                            self.path.display(),
                            line,
                            key,
                            part.trim()
                        ))
                    })?);
                }
                Ok(Some(out))
            }
        }
    }

    fn require_f64(&mut self, key: &str, section_line: usize) -> ConfigResult<f64> {
        self.take_f64(key)?.ok_or_else(|| {
            ConfigError::new(format!(
                "{}:{}: [{}] is missing required key `{}`",
                self.path.display(),
                section_line,
                self.name,
                key
            ))
        })
    }

    fn finish(self) -> ConfigResult<()> {
        if let Some((key, (_, line))) = self.map.into_iter().next() {
            return Err(ConfigError::new(format!(
                "{}:{}: unknown key `{}` in [{}]",
                self.path.display(),
                line,
                key,
                self.name
            )));
        }
        Ok(())
    }
}

fn parse_blockage(path: &Path, section: &RawSection) -> ConfigResult<MaskPrimitive> {
    let mut r = SectionReader::new(path, section)?;
    let shape_name = r.take_string("shape").ok_or_else(|| {
        ConfigError::new(format!(
            "{}:{}: [{}] needs `shape = disc|ellipse|rectangle`",
            path.display(),
            section.line,
            section.name
        ))
    })?;
    let center = r
        .take_f64_list("center_mm")?
        .unwrap_or_else(|| vec![0.0, 0.0]);
    if center.len() != 2 {
        return Err(ConfigError::new(format!(
            "{}:{}: `center_mm` needs two values",
            path.display(),
            section.line
        )));
    }
    let transmission = r.take_f64("transmission")?.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&transmission) {
        return Err(ConfigError::new(format!(
            "{}:{}: `transmission` must be in [0, 1]",
            path.display(),
            section.line
        )));
    }
    let center_xy = (center[0], center[1]);
    let shape = match shape_name.as_str() {
        "disc" => MaskShape::Disc {
            center_xy,
            radius_mm: r.require_f64("radius_mm", section.line)?,
        },
        "ellipse" => {
            let axes = r.take_f64_list("semi_axes_mm")?.ok_or_else(|| {
                ConfigError::new(format!(
                    "{}:{}: ellipse needs `semi_axes_mm = a, b`",
                    path.display(),
                    section.line
                ))
            })?;
            if axes.len() != 2 {
                return Err(ConfigError::new(format!(
                    "{}:{}: `semi_axes_mm` needs two values",
                    path.display(),
                    section.line
                )));
            }
            MaskShape::Ellipse {
                center_xy,
                semi_axes_mm: (axes[0], axes[1]),
                rotation_deg: r.take_f64("rotation_deg")?.unwrap_or(0.0),
            }
        }
        "rectangle" => {
            let ext = r.take_f64_list("half_extents_mm")?.ok_or_else(|| {
                ConfigError::new(format!(
                    "{}:{}: rectangle needs `half_extents_mm = x, y`",
                    path.display(),
                    section.line
                ))
            })?;
            if ext.len() != 2 {
                return Err(ConfigError::new(format!(
                    "{}:{}: `half_extents_mm` needs two values",
                    path.display(),
                    section.line
                )));
            }
            MaskShape::Rectangle {
                center_xy,
                half_extents_mm: (ext[0], ext[1]),
                rotation_deg: r.take_f64("rotation_deg")?.unwrap_or(0.0),
            }
        }
        other => {
            return Err(ConfigError::new(format!(
                "{}:{}: unknown shape `{}`",
                path.display(),
                section.line,
                other
            )));
        }
    };
    r.finish()?;
    Ok(MaskPrimitive {
        shape,
        transmission,
    })
}

/// Loads and validates a config file.
pub fn load_config(path: &Path) -> ConfigResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError::new(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut config = RunConfig {
        config_hash: reflector_core::numeric::fnv1a(text.as_bytes()),
        ..RunConfig::default()
    };
    let known_ids = ["offset_fed", "backfed_a", "backfed_b"];

    for section in parse_sections(&text, path)? {
        match section.name.as_str() {
            "" => {}
            "scenario" => {
                let mut r = SectionReader::new(path, &section)?;
                if let Some(ids) = r.take_string("ids") {
                    config.scenario_ids = ids
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                }
                r.finish()?;
                for id in &config.scenario_ids {
                    if !known_ids.contains(&id.as_str()) {
                        return Err(ConfigError::new(format!(
                            "{}:{}: unknown scenario id `{}` (known: {})",
                            path.display(),
                            section.line,
                            id,
                            known_ids.join(", ")
                        )));
                    }
                }
                if config.scenario_ids.is_empty() {
                    return Err(ConfigError::new(format!(
                        "{}:{}: `ids` selected no scenarios",
                        path.display(),
                        section.line
                    )));
                }
            }
            "geometry" => {
                let mut r = SectionReader::new(path, &section)?;
                // The core quartet is all-or-nothing so a partial geometry
                // cannot silently mix with baseline defaults.
                config.params.main_diameter_mm = r.require_f64("main_diameter_mm", section.line)?;
                config.params.main_focal_length_mm =
                    r.require_f64("main_focal_length_mm", section.line)?;
                config.params.sub_diameter_mm = r.require_f64("sub_diameter_mm", section.line)?;
                config.params.magnification = r.require_f64("magnification", section.line)?;
                if let Some(v) = r.take_f64("offset_parent_focal_mm")? {
                    config.params.offset_parent_focal_mm = v;
                }
                if let Some(v) = r.take_f64("offset_clearance_mm")? {
                    config.params.offset_clearance_mm = v;
                }
                if let Some(v) = r.take_f64("mirror_diameter_mm")? {
                    config.params.mirror_diameter_mm = v;
                }
                if let Some(v) = r.take_f64("mirror_effective_diameter_mm")? {
                    config.params.mirror_effective_diameter_mm = v;
                }
                if let Some(v) = r.take_f64("plate_diameter_factor")? {
                    config.params.plate_diameter_factor = v;
                }
                if let Some(v) = r.take_f64("plate_loss_db")? {
                    config.params.plate_loss_db = v;
                }
                if let Some(v) = r.take_f64("film_loss_db")? {
                    config.params.film_loss_db = v;
                }
                r.finish()?;
            }
            "feed" => {
                let mut r = SectionReader::new(path, &section)?;
                let model = r.take_string("model").unwrap_or_else(|| "cos_q".into());
                if let Some(v) = r.take_f64("edge_taper_db")? {
                    if v > 0.0 {
                        return Err(ConfigError::new(format!(
                            "{}:{}: `edge_taper_db` must be <= 0",
                            path.display(),
                            section.line
                        )));
                    }
                    config.params.edge_taper_db = v;
                }
                if let Some(v) = r.take_f64("edge_taper_angle_deg")? {
                    config.params.edge_taper_angle_deg = v;
                }
                if let Some(v) = r.take_f64("phase_center_offset_mm")? {
                    config.params.phase_center_offset_mm = v;
                }
                let e_csv = r.take_string("e_plane_csv");
                let h_csv = r.take_string("h_plane_csv");
                config.feed = match model.as_str() {
                    "cos_q" => FeedChoice::CosQ,
                    "gaussian" => FeedChoice::Gaussian,
                    "tabulated" => {
                        let (Some(e), Some(h)) = (e_csv.clone(), h_csv.clone()) else {
                            return Err(ConfigError::new(format!(
                                "{}:{}: tabulated feed needs `e_plane_csv` and `h_plane_csv`",
                                path.display(),
                                section.line
                            )));
                        };
                        FeedChoice::Tabulated {
                            e_plane_csv: path.parent().unwrap_or(Path::new(".")).join(e),
                            h_plane_csv: path.parent().unwrap_or(Path::new(".")).join(h),
                        }
                    }
                    other => {
                        return Err(ConfigError::new(format!(
                            "{}:{}: unknown feed model `{}`",
                            path.display(),
                            section.line,
                            other
                        )));
                    }
                };
                if matches!(config.feed, FeedChoice::CosQ | FeedChoice::Gaussian)
                    && (e_csv.is_some() || h_csv.is_some())
                {
                    return Err(ConfigError::new(format!(
                        "{}:{}: pattern CSV keys are only valid for `model = tabulated`",
                        path.display(),
                        section.line
                    )));
                }
                r.finish()?;
            }
            "run" => {
                let mut r = SectionReader::new(path, &section)?;
                if let Some(v) = r.take_f64_list("frequencies_ghz")? {
                    if v.is_empty() {
                        return Err(ConfigError::new(format!(
                            "{}:{}: `frequencies_ghz` selected no frequencies",
                            path.display(),
                            section.line
                        )));
                    }
                    config.params.frequencies_ghz = v;
                }
                if let Some(v) = r.take_usize("grid_n")? {
                    config.grid_n = v;
                }
                if let Some(v) = r.take_f64("theta_min_deg")? {
                    config.theta_min_deg = v;
                }
                if let Some(v) = r.take_f64("theta_max_deg")? {
                    config.theta_max_deg = v;
                }
                if let Some(v) = r.take_usize("n_points")? {
                    config.cut_points = v;
                }
                if let Some(v) = r.take_string("out_dir") {
                    config.out_dir = PathBuf::from(v);
                }
                r.finish()?;
            }
            "sweep" => {
                let mut r = SectionReader::new(path, &section)?;
                config.sweep_parameter = r.take_string("parameter");
                if let Some(v) = r.take_f64_list("values")? {
                    config.sweep_values = v;
                }
                r.finish()?;
            }
            name if name.starts_with("blockage.") => {
                config.extra_mask.push(parse_blockage(path, &section)?);
            }
            other => {
                return Err(ConfigError::new(format!(
                    "{}:{}: unknown section [{}]",
                    path.display(),
                    section.line,
                    other
                )));
            }
        }
    }

    if config.theta_min_deg >= config.theta_max_deg {
        return Err(ConfigError::new(
            "theta_min_deg must be below theta_max_deg".to_string(),
        ));
    }
    if config.cut_points < 3 {
        return Err(ConfigError::new("n_points must be at least 3".to_string()));
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> (tempdir::TempDirGuard, PathBuf) {
        let dir = tempdir::make();
        let path = dir.path.join("config.ini");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        (dir, path)
    }

    // Minimal temp-dir helper to avoid a dev-dependency.
    mod tempdir {
        use std::path::PathBuf;

        pub struct TempDirGuard {
            pub path: PathBuf,
        }

        impl Drop for TempDirGuard {
            fn drop(&mut self) {
                let _ = std::fs::remove_dir_all(&self.path);
            }
        }

        pub fn make() -> TempDirGuard {
            let path = std::env::temp_dir().join(format!(
                "reflector-cfg-{}-{:?}",
                std::process::id(),
                std::thread::current().id()
            ));
            std::fs::create_dir_all(&path).unwrap();
            TempDirGuard { path }
        }
    }

    #[test]
    fn defaults_when_sections_absent() {
        let (_g, path) = write_config("# empty\n");
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.scenario_ids.len(), 3);
        assert_eq!(cfg.grid_n, 1024);
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let (_g, path) = write_config("[run]\ngrid_n = 512\nbogus_key = 1\n");
        let err = load_config(&path).unwrap_err();
        assert!(err.message.contains(":3:"), "{}", err.message);
        assert!(err.message.contains("bogus_key"), "{}", err.message);
    }

    #[test]
    fn unknown_section_rejected() {
        let (_g, path) = write_config("[nonsense]\nx = 1\n");
        let err = load_config(&path).unwrap_err();
        assert!(err.message.contains("[nonsense]"), "{}", err.message);
    }

    #[test]
    fn geometry_requires_core_quartet() {
        let (_g, path) = write_config(
            "[geometry]\nmain_focal_length_mm = 190\nsub_diameter_mm = 60\nmagnification = 5\n",
        );
        let err = load_config(&path).unwrap_err();
        assert!(err.message.contains("main_diameter_mm"), "{}", err.message);
    }

    #[test]
    fn blockage_sections_accumulate() {
        let (_g, path) = write_config(
            "[blockage.0]\nshape = disc\ncenter_mm = 0, 0\nradius_mm = 30\ntransmission = 0\n\
             [blockage.1]\nshape = ellipse\nsemi_axes_mm = 40, 20\nrotation_deg = 15\n",
        );
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.extra_mask.len(), 2);
    }

    #[test]
    fn scenario_ids_validated() {
        let (_g, path) = write_config("[scenario]\nids = backfed_b, mystery\n");
        let err = load_config(&path).unwrap_err();
        assert!(err.message.contains("mystery"), "{}", err.message);
    }

    #[test]
    fn values_parse_and_override() {
        let (_g, path) = write_config(
            "[scenario]\nids = backfed_b\n[run]\nfrequencies_ghz = 93.5, 94, 94.5\ngrid_n = 512\n\
             [feed]\nmodel = cos_q\nedge_taper_db = -14\n",
        );
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.scenario_ids, vec!["backfed_b".to_string()]);
        assert_eq!(cfg.params.frequencies_ghz, vec![93.5, 94.0, 94.5]);
        assert_eq!(cfg.grid_n, 512);
        assert_eq!(cfg.params.edge_taper_db, -14.0);
    }
}
