//! Named pipeline configurations for the four standard model structures.

use crate::arima::ModelSpec;
use crate::backtest::{PipelineConfig, PipelineKind};
use crate::garch::GarchSpec;
use crate::series::{ClipBounds, LogOffset};

pub const PRESET_NAMES: [&str; 4] = ["sarima-paper", "sarimax-paper", "arma-paper", "armax-paper"];

/// Looks up a preset by name; `garch` adds a GARCH(1,1) layer.
pub fn preset(name: &str, garch: bool) -> Option<PipelineConfig> {
    let seasonal = ModelSpec::sarima((2, 0, 1), (1, 1, 1), 24);
    let (kind, spec, clip, c) = match name {
        "sarima-paper" => (PipelineKind::SarimaRtlmp, seasonal, None, 30.0),
        "sarimax-paper" => (PipelineKind::SarimaxRtlmp, seasonal.with_exog(1), None, 30.0),
        "arma-paper" => (
            PipelineKind::ArmaDelta,
            ModelSpec::arma(1, 2),
            Some(delta_bounds()),
            1000.0,
        ),
        "armax-paper" => (
            PipelineKind::ArmaxDelta,
            ModelSpec::arma(1, 1).with_exog(1),
            Some(delta_bounds()),
            1000.0,
        ),
        _ => return None,
    };
    Some(PipelineConfig {
        kind,
        clip,
        log_offset: LogOffset::new(c).expect("positive offset"),
        spec,
        garch: garch.then(GarchSpec::default),
        lognormal_correction: false,
    })
}

fn delta_bounds() -> ClipBounds {
    ClipBounds::new(100.0, -100.0).expect("ordered bounds")
}
