//! Offered traffic: per-scan Erlang traces, busy-hour KPI rows and the
//! conversion from Erlang to concurrent calls.

mod csv_io;
pub mod fleet;

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::cell_model::CellConfig;
use crate::error::{Error, Result};
use crate::seed;

pub use csv_io::{
    read_kpi_csv, read_traffic_csv, write_kpi_csv, write_traffic_csv, KPI_HEADER, TRAFFIC_HEADER,
};

pub const SECONDS_PER_HOUR: u32 = 3600;
pub const SECONDS_PER_DAY: u32 = 86_400;

/// Offered traffic in Erlang, one sample per scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficTrace {
    pub cell_id: String,
    pub scan_period_s: f64,
    pub samples: Vec<f64>,
}

impl TrafficTrace {
    pub fn new(cell_id: impl Into<String>, scan_period_s: f64, samples: Vec<f64>) -> Result<Self> {
        let trace = TrafficTrace {
            cell_id: cell_id.into(),
            scan_period_s,
            samples,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::input(format!("trace for {} is empty", self.cell_id)));
        }
        if !(self.scan_period_s.is_finite() && self.scan_period_s > 0.0) {
            return Err(Error::input(format!(
                "trace for {}: bad scan period {}",
                self.cell_id, self.scan_period_s
            )));
        }
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::input(format!(
                "trace for {}: sample {i} = {} is not a finite non-negative Erlang value",
                self.cell_id, self.samples[i]
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One busy-hour KPI row per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiRecord {
    pub cell_id: String,
    pub tch_traffic_erl: f64,
    pub dl_edge_throughput_kbps: f64,
    pub pdch_congestion_pct: f64,
    pub preempt_pdch: f64,
    pub ts_count: u32,
}

impl KpiRecord {
    /// The five clustering features in column order.
    pub fn features(&self) -> [f64; 5] {
        [
            self.tch_traffic_erl,
            self.dl_edge_throughput_kbps,
            self.pdch_congestion_pct,
            self.preempt_pdch,
            self.ts_count as f64,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, max: f64| {
            if v.is_finite() && v >= 0.0 && v <= max {
                Ok(())
            } else {
                Err(Error::input(format!(
                    "{}: {name} = {v} out of range",
                    self.cell_id
                )))
            }
        };
        check("tch_traffic_erl", self.tch_traffic_erl, f64::MAX)?;
        check(
            "dl_edge_throughput_kbps",
            self.dl_edge_throughput_kbps,
            f64::MAX,
        )?;
        check("pdch_congestion_pct", self.pdch_congestion_pct, 100.0)?;
        check("preempt_pdch", self.preempt_pdch, f64::MAX)?;
        if self.ts_count == 0 {
            return Err(Error::input(format!(
                "{}: ts_count must be positive",
                self.cell_id
            )));
        }
        Ok(())
    }
}

/// Averages one cell's daily busy-hour readings.
pub fn busy_hour_average(daily: &[KpiRecord]) -> Result<KpiRecord> {
    let first = daily
        .first()
        .ok_or_else(|| Error::input("busy-hour average needs at least one reading"))?;
    if let Some(other) = daily.iter().find(|r| r.cell_id != first.cell_id) {
        return Err(Error::input(format!(
            "mixed cells in busy-hour readings: {} and {}",
            first.cell_id, other.cell_id
        )));
    }
    if let Some(other) = daily.iter().find(|r| r.ts_count != first.ts_count) {
        return Err(Error::input(format!(
            "{}: ts_count changes between readings ({} vs {})",
            first.cell_id, first.ts_count, other.ts_count
        )));
    }
    let n = daily.len() as f64;
    let mean = |f: fn(&KpiRecord) -> f64| daily.iter().map(f).sum::<f64>() / n;
    Ok(KpiRecord {
        cell_id: first.cell_id.clone(),
        tch_traffic_erl: mean(|r| r.tch_traffic_erl),
        dl_edge_throughput_kbps: mean(|r| r.dl_edge_throughput_kbps),
        pdch_congestion_pct: mean(|r| r.pdch_congestion_pct),
        preempt_pdch: mean(|r| r.preempt_pdch),
        ts_count: first.ts_count,
    })
}

/// Day/night traffic shape: a raised cosine rising from `base_erlang` at
/// `trough_hour` to `peak_erlang` at `peak_hour` and falling back, sampled
/// hourly and interpolated linearly per scan, plus Gaussian noise clipped at
/// zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiurnalProfileSpec {
    pub base_erlang: f64,
    pub peak_erlang: f64,
    pub peak_hour: u32,
    pub trough_hour: u32,
    pub noise_sigma: f64,
    pub days: u32,
    pub seed: u64,
    pub scan_period_s: u32,
}

impl DiurnalProfileSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = self.base_erlang.is_finite() && self.peak_erlang.is_finite();
        if !finite || self.base_erlang < 0.0 || self.peak_erlang < self.base_erlang {
            return Err(Error::config(format!(
                "need 0 <= base ({}) <= peak ({})",
                self.base_erlang, self.peak_erlang
            )));
        }
        if self.peak_hour >= 24 || self.trough_hour >= 24 || self.peak_hour == self.trough_hour {
            return Err(Error::config(format!(
                "peak hour {} and trough hour {} must be distinct hours in 0..24",
                self.peak_hour, self.trough_hour
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::config(format!(
                "noise sigma {} must be >= 0",
                self.noise_sigma
            )));
        }
        if self.days == 0 {
            return Err(Error::config("days must be >= 1"));
        }
        if self.scan_period_s == 0 || !SECONDS_PER_HOUR.is_multiple_of(self.scan_period_s) {
            return Err(Error::config(format!(
                "scan period {} s must divide one hour",
                self.scan_period_s
            )));
        }
        Ok(())
    }

    /// Noise-free template value at an integer hour of day.
    pub fn hourly_template(&self, hour: u32) -> f64 {
        let rise = (self.peak_hour + 24 - self.trough_hour) % 24;
        let fall = 24 - rise;
        let since_trough = (hour % 24 + 24 - self.trough_hour) % 24;
        let phase = if since_trough <= rise {
            since_trough as f64 / rise as f64
        } else {
            1.0 - (since_trough - rise) as f64 / fall as f64
        };
        self.base_erlang + (self.peak_erlang - self.base_erlang) * (1.0 - (PI * phase).cos()) / 2.0
    }

    pub fn scans_per_day(&self) -> usize {
        (SECONDS_PER_DAY / self.scan_period_s) as usize
    }
}

/// Generated samples are quantized to milli-Erlang.
const QUANTA_PER_ERLANG: f64 = 1000.0;

pub fn generate_diurnal_trace(cell_id: &str, spec: &DiurnalProfileSpec) -> Result<TrafficTrace> {
    spec.validate()?;
    let scans_per_hour = (SECONDS_PER_HOUR / spec.scan_period_s) as usize;
    let template: Vec<f64> = (0..=24).map(|h| spec.hourly_template(h)).collect();
    let noise = if spec.noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.noise_sigma).map_err(Error::config)?)
    } else {
        None
    };
    let mut rng = seed::rng(spec.seed);
    let total = spec.days as usize * spec.scans_per_day();
    let mut samples = Vec::with_capacity(total);
    for i in 0..total {
        let in_day = i % spec.scans_per_day();
        let hour = in_day / scans_per_hour;
        let frac = (in_day % scans_per_hour) as f64 / scans_per_hour as f64;
        let clean = template[hour] + (template[hour + 1] - template[hour]) * frac;
        let noisy = match &noise {
            Some(n) => clean + n.sample(&mut rng),
            None => clean,
        };
        samples.push((noisy.max(0.0) * QUANTA_PER_ERLANG).round() / QUANTA_PER_ERLANG);
    }
    TrafficTrace::new(cell_id, spec.scan_period_s as f64, samples)
}

/// Erlang-B blocking probability for `erlangs` offered to `channels`
/// servers, by the standard recursion.
pub fn erlang_b(erlangs: f64, channels: u32) -> f64 {
    (1..=channels).fold(1.0, |b, n| {
        let eb = erlangs * b;
        eb / (n as f64 + eb)
    })
}

/// Monotone maps from busy-hour load to the packet-data KPIs. They stand in
/// for operator counters when the fleet is generated synthetically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiSynthesis {
    /// Downlink EDGE throughput at zero load.
    pub throughput_idle_kbps: f64,
    /// Throughput lost per unit TCH utilisation.
    pub throughput_slope_kbps: f64,
    /// Pre-empted PDCHs at full utilisation (scales utilisation squared).
    pub preempt_scale: f64,
}

impl Default for KpiSynthesis {
    fn default() -> Self {
        KpiSynthesis {
            throughput_idle_kbps: 140.0,
            throughput_slope_kbps: 60.0,
            preempt_scale: 600.0,
        }
    }
}

fn round5(v: f64) -> f64 {
    (v * 1e5).round() / 1e5
}

impl KpiSynthesis {
    /// Synthesizes one reading from a busy-hour Erlang value.
    pub fn reading(&self, cell: &CellConfig, busy_erlang: f64) -> KpiRecord {
        let capacity = cell.total_tch();
        let utilisation = busy_erlang / capacity as f64;
        KpiRecord {
            cell_id: cell.cell_id.clone(),
            tch_traffic_erl: busy_erlang,
            dl_edge_throughput_kbps: round5(
                (self.throughput_idle_kbps - self.throughput_slope_kbps * utilisation).max(0.0),
            ),
            pdch_congestion_pct: round5(100.0 * erlang_b(busy_erlang, capacity)),
            preempt_pdch: round5(self.preempt_scale * utilisation * utilisation),
            ts_count: cell.total_slots(),
        }
    }
}

/// Mean Erlang of the busiest contiguous hour in each day of the trace.
/// A trailing partial day counts only if it holds a full hour.
pub fn daily_busy_hours(trace: &TrafficTrace) -> Vec<f64> {
    let per_hour = ((SECONDS_PER_HOUR as f64 / trace.scan_period_s).round() as usize).max(1);
    let per_day = ((SECONDS_PER_DAY as f64 / trace.scan_period_s).round() as usize).max(1);
    let mut out: Vec<f64> = trace
        .samples
        .chunks(per_day)
        .filter(|day| day.len() >= per_hour)
        .map(|day| busiest_window(day, per_hour))
        .collect();
    if out.is_empty() {
        let s = &trace.samples;
        out.push(s.iter().sum::<f64>() / s.len() as f64);
    }
    out
}

fn busiest_window(day: &[f64], width: usize) -> f64 {
    let mut sum: f64 = day[..width].iter().sum();
    let mut best = sum;
    for i in width..day.len() {
        sum += day[i] - day[i - width];
        best = best.max(sum);
    }
    best / width as f64
}

/// Builds a busy-hour KPI row from a simulated trace.
pub fn trace_to_kpis(
    trace: &TrafficTrace,
    cell: &CellConfig,
    synth: &KpiSynthesis,
) -> Result<KpiRecord> {
    trace.validate()?;
    let daily: Vec<KpiRecord> = daily_busy_hours(trace)
        .into_iter()
        .map(|erl| synth.reading(cell, erl))
        .collect();
    let mut avg = busy_hour_average(&daily)?;
    avg.tch_traffic_erl = round5(avg.tch_traffic_erl);
    avg.dl_edge_throughput_kbps = round5(avg.dl_edge_throughput_kbps);
    avg.pdch_congestion_pct = round5(avg.pdch_congestion_pct);
    avg.preempt_pdch = round5(avg.preempt_pdch);
    Ok(avg)
}

/// Conversion from offered Erlang to concurrent calls at a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DemandModel {
    /// round(E): one Erlang is one continuously held channel.
    Rounded,
    /// Poisson-distributed call count with mean E.
    Poisson { seed: u64 },
}

impl DemandModel {
    pub fn source(self) -> DemandSource {
        match self {
            DemandModel::Rounded => DemandSource { rng: None },
            DemandModel::Poisson { seed } => DemandSource {
                rng: Some(seed::rng(seed)),
            },
        }
    }
}

pub struct DemandSource {
    rng: Option<ChaCha8Rng>,
}

impl DemandSource {
    pub fn demand(&mut self, offered_erlang: f64) -> u32 {
        let offered = offered_erlang.max(0.0);
        match &mut self.rng {
            None => offered.round().min(u32::MAX as f64) as u32,
            Some(rng) => {
                if offered <= 0.0 {
                    return 0;
                }
                match Poisson::new(offered) {
                    Ok(p) => p.sample(rng).min(u32::MAX as f64) as u32,
                    Err(_) => offered.round() as u32,
                }
            }
        }
    }
}

/// Draws a uniform value in `[lo, hi)`.
pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> DiurnalProfileSpec {
        DiurnalProfileSpec {
            base_erlang: 0.5,
            peak_erlang: 7.3,
            peak_hour: 20,
            trough_hour: 4,
            noise_sigma: 0.0,
            days: 2,
            seed: 1,
            scan_period_s: 10,
        }
    }

    fn kpi(cell: &str, erl: f64) -> KpiRecord {
        KpiRecord {
            cell_id: cell.into(),
            tch_traffic_erl: erl,
            dl_edge_throughput_kbps: 130.0,
            pdch_congestion_pct: 0.01,
            preempt_pdch: 3.0,
            ts_count: 24,
        }
    }

    #[test]
    fn trace_length_matches_days_and_period() {
        let t = generate_diurnal_trace("c", &spec()).unwrap();
        assert_eq!(t.len(), 2 * 8640);
        let mut s = spec();
        s.scan_period_s = 60;
        s.days = 6;
        assert_eq!(generate_diurnal_trace("c", &s).unwrap().len(), 6 * 1440);
    }

    #[test]
    fn zero_base_trough_is_exactly_zero() {
        let mut s = spec();
        s.base_erlang = 0.0;
        let t = generate_diurnal_trace("c", &s).unwrap();
        let trough = 4 * 360;
        assert_eq!(t.samples[trough], 0.0);
        assert_eq!(t.samples[8640 + trough], 0.0);
    }

    #[test]
    fn peak_of_noise_free_trace() {
        // template oracle: the cosine reaches 1 exactly at the peak hour
        let t = generate_diurnal_trace("c", &spec()).unwrap();
        let max = t.samples.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, 7.3);
        assert_eq!(t.samples[20 * 360], 7.3);
        let min = t.samples.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(min, 0.5);
    }

    #[test]
    fn template_is_continuous_across_midnight() {
        let s = DiurnalProfileSpec {
            peak_hour: 2,
            trough_hour: 14,
            ..spec()
        };
        assert_eq!(s.hourly_template(2), 7.3);
        assert_eq!(s.hourly_template(14), 0.5);
        assert!((s.hourly_template(0) - s.hourly_template(24)).abs() < 1e-12);
    }

    #[test]
    fn generator_is_deterministic() {
        let s = DiurnalProfileSpec {
            noise_sigma: 0.4,
            ..spec()
        };
        let a = generate_diurnal_trace("c", &s).unwrap();
        let b = generate_diurnal_trace("c", &s).unwrap();
        assert_eq!(a, b);
        let c = generate_diurnal_trace("c", &DiurnalProfileSpec { seed: 2, ..s }).unwrap();
        assert_ne!(a, c);
        assert!(a.samples.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn bad_specs_rejected() {
        for s in [
            DiurnalProfileSpec {
                base_erlang: 8.0,
                ..spec()
            },
            DiurnalProfileSpec {
                base_erlang: -1.0,
                ..spec()
            },
            DiurnalProfileSpec {
                peak_hour: 24,
                ..spec()
            },
            DiurnalProfileSpec {
                trough_hour: 20,
                ..spec()
            },
            DiurnalProfileSpec {
                noise_sigma: -0.1,
                ..spec()
            },
            DiurnalProfileSpec { days: 0, ..spec() },
            DiurnalProfileSpec {
                scan_period_s: 7,
                ..spec()
            },
        ] {
            assert!(
                matches!(generate_diurnal_trace("c", &s), Err(Error::Config(_))),
                "{s:?}"
            );
        }
    }

    #[test]
    fn busy_hour_average_identity_and_mean() {
        let one = kpi("a", 2.0);
        assert_eq!(busy_hour_average(std::slice::from_ref(&one)).unwrap(), one);
        let avg = busy_hour_average(&[kpi("a", 2.0), kpi("a", 4.0)]).unwrap();
        assert_eq!(avg.tch_traffic_erl, 3.0);
        assert_eq!(avg.ts_count, 24);
    }

    #[test]
    fn busy_hour_average_rejects_mixed_cells() {
        assert!(matches!(
            busy_hour_average(&[kpi("a", 2.0), kpi("b", 4.0)]),
            Err(Error::Input(_))
        ));
        assert!(busy_hour_average(&[]).is_err());
    }

    #[test]
    fn ninety_day_average_matches_summation() {
        let daily: Vec<KpiRecord> = (0..90)
            .map(|d| kpi("a", 1.0 + (d as f64 * 0.37) % 5.0))
            .collect();
        let mut oracle = 0.0;
        for r in &daily {
            oracle += r.tch_traffic_erl;
        }
        oracle /= 90.0;
        let avg = busy_hour_average(&daily).unwrap();
        assert!((avg.tch_traffic_erl - oracle).abs() < 1e-12);
    }

    #[test]
    fn erlang_b_matches_closed_form() {
        // B(E, N) = (E^N / N!) / sum_k E^k / k!
        for &(e, n) in &[(1.0, 1u32), (2.5, 5), (7.3, 21), (20.0, 13)] {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..=n {
                term *= e / k as f64;
                sum += term;
            }
            let closed = term / sum;
            assert!((erlang_b(e, n) - closed).abs() < 1e-12, "{e} {n}");
        }
        assert_eq!(erlang_b(0.0, 5), 0.0);
    }

    #[test]
    fn zero_trace_gives_zero_kpis() {
        let cell = CellConfig::new("z", 3, 3).unwrap();
        let trace = TrafficTrace::new("z", 10.0, vec![0.0; 8640]).unwrap();
        let k = trace_to_kpis(&trace, &cell, &KpiSynthesis::default()).unwrap();
        assert_eq!(k.tch_traffic_erl, 0.0);
        assert_eq!(k.pdch_congestion_pct, 0.0);
        assert_eq!(k.preempt_pdch, 0.0);
        assert_eq!(k.ts_count, 24);
    }

    #[test]
    fn constant_trace_mean() {
        let cell = CellConfig::new("z", 3, 3).unwrap();
        let trace = TrafficTrace::new("z", 10.0, vec![5.0; 3 * 8640]).unwrap();
        let k = trace_to_kpis(&trace, &cell, &KpiSynthesis::default()).unwrap();
        assert_eq!(k.tch_traffic_erl, 5.0);
    }

    #[test]
    fn synthetic_kpis_are_monotone_in_load() {
        let cell = CellConfig::new("z", 3, 3).unwrap();
        let synth = KpiSynthesis::default();
        let mut prev: Option<KpiRecord> = None;
        for load in [0.0, 1.0, 4.0, 9.0, 15.0, 21.0, 30.0] {
            let trace = TrafficTrace::new("z", 10.0, vec![load; 8640]).unwrap();
            let k = trace_to_kpis(&trace, &cell, &synth).unwrap();
            if let Some(p) = prev {
                assert!(p.pdch_congestion_pct <= k.pdch_congestion_pct);
                assert!(p.preempt_pdch <= k.preempt_pdch);
                assert!(p.dl_edge_throughput_kbps >= k.dl_edge_throughput_kbps);
            }
            prev = Some(k);
        }
    }

    #[test]
    fn busy_window_picks_the_peak_hour() {
        let mut samples = vec![1.0; 8640];
        for v in &mut samples[1000..1360] {
            *v = 6.0;
        }
        let trace = TrafficTrace::new("b", 10.0, samples).unwrap();
        assert_eq!(daily_busy_hours(&trace), vec![6.0]);
        let short = TrafficTrace::new("b", 10.0, vec![2.0, 4.0]).unwrap();
        assert_eq!(daily_busy_hours(&short), vec![3.0]);
    }

    #[test]
    fn rounded_demand_is_mean_occupancy() {
        let mut src = DemandModel::Rounded.source();
        assert_eq!(src.demand(4.6), 5);
        assert_eq!(src.demand(4.4), 4);
        assert_eq!(src.demand(0.0), 0);
    }

    #[test]
    fn poisson_demand_has_the_offered_mean() {
        let mut src = DemandModel::Poisson { seed: 9 }.source();
        let n = 20_000;
        let mean = (0..n).map(|_| src.demand(6.0) as f64).sum::<f64>() / n as f64;
        assert!((mean - 6.0).abs() < 0.1, "{mean}");
        assert_eq!(src.demand(0.0), 0);
    }
}
