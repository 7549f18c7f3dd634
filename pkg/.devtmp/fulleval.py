from nlstplan.catalog import load_dataset
from nlstplan import corpus as C
from nlstplan.nlu import TypeClassifier
from nlstplan.cli import evaluate
from nlstplan.data_paths import datasets_dir, default_model_path
import time

db = load_dataset(datasets_dir() / 'minicity')
clf = TypeClassifier.load(default_model_path())
entries = C.generate(db, 500, seed=99)
t0 = time.time()
report = evaluate(db, entries, clf)
print('eval wall:', round(time.time()-t0,1), 's', flush=True)
print('translatability:', report.translatability, 'precision:', report.precision)
print('mean ms:', round(report.mean_response_ms,1), 'p95 ms:', round(report.p95_response_ms,1))
for qt, b in report.per_type.items(): print(' ', qt, b)
