"""End-to-end prognostics: train on a labeled series, predict windows on a
fresh series, reconstruct merged fault events and score them per tick
against the reference intervals.
"""

import tempfile
import warnings

import imbfault as ib

warnings.filterwarnings("ignore", category=UserWarning)

intervals = [ib.FaultInterval(400, 700, "fault"),
             ib.FaultInterval(1300, 1600, "fault"),
             ib.FaultInterval(2200, 2500, "fault")]

train_frame, train_ivs = ib.synthetic_timeseries(3000, intervals, n_channels=3,
                                                 shift=3.0, seed=1)
test_frame, test_ivs = ib.synthetic_timeseries(3000, intervals, n_channels=3,
                                               shift=3.0, seed=2)
train = ib.label_timestamps(train_frame, train_ivs, "normal")
test = ib.LabeledSeries(test_frame, ["normal"] * test_frame.n_ticks)

cfg = ib.PipelineConfig(window_len=20, slide_len=5, sampler="ewmote",
                        rounds=50, max_depth=3, seed=0)

with tempfile.TemporaryDirectory() as out_dir:
    result = ib.run_predict_events(train, test, cfg, out_dir,
                                   true_intervals=test_ivs)

print("true fault intervals:")
for iv in test_ivs:
    print(f"  [{iv.t_start:6.0f}, {iv.t_end:6.0f}]  {iv.label}")
print("\npredicted merged events:")
for ev in result["events"]:
    print(f"  [{ev.t_start:6.0f}, {ev.t_end:6.0f}]  {ev.label}")

frac = (result["fn_ticks"] + result["fp_ticks"]) / result["true_faulty_ticks"]
print(f"\nper-tick score: FN={result['fn_ticks']} FP={result['fp_ticks']} "
      f"({frac:.1%} of {result['true_faulty_ticks']} faulty ticks)")
