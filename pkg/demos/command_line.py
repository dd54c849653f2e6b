"""
Command-line batch run
======================

The ``exposurefix`` command corrects a single file or every PNG/JPEG in a
folder, writing one JSON report line per image and a final summary. A bad
file is reported and skipped; the rest of the batch still runs.
"""
import json
import os
import subprocess
import sys

from _common import OUT, mixed_exposure, sample
from exposurefix.image import save

src = os.path.join(OUT, 'cli_in')
dst = os.path.join(OUT, 'cli_out')
os.makedirs(src, exist_ok=True)

save(sample('rocket', 160) * 0.3, os.path.join(src, 'rocket.png'))
save(mixed_exposure(sample('coffee', 160)), os.path.join(src, 'coffee.jpg'))
with open(os.path.join(src, 'broken.png'), 'wb') as fh:
    fh.write(b'not really a png')

# %% batch mode, two images at a time
proc = subprocess.run([sys.executable, '-m', 'exposurefix', '--input', src, '--output', dst,
                       '--jobs', '2', '--save-intermediates'],
                      capture_output=True, text=True)
print('exit code', proc.returncode)
for line in proc.stdout.splitlines():
    rep = json.loads(line)
    if 'summary' in rep:
        print('summary', rep['summary'])
    elif rep['status'] == 'ok':
        print(f"{os.path.basename(rep['input'])}: {rep['width']}x{rep['height']} "
              f"in {rep['timings']['total']:.2f}s, "
              f"CG {rep['solver']['forward']['iterations']}+{rep['solver']['reverse']['iterations']} its")

# %% flags are validated before anything runs
bad = subprocess.run([sys.executable, '-m', 'exposurefix', '--input', src, '--output', dst,
                      '--window', '14'], capture_output=True, text=True)
print('even window -> exit', bad.returncode, '|', bad.stderr.strip().splitlines()[-1])
