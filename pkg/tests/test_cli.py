import json
import os
import subprocess
import sys

import numpy as np
import pytest

import corpus
from exposurefix import cli
from exposurefix.fusion import FusionParams
from exposurefix.illumination import IlluminationParams
from exposurefix.image import load, save
from exposurefix.solver import SolverSettings


@pytest.fixture
def dark_png(tmp_path):
    path = tmp_path / 'dark.png'
    save(corpus.photo('coffee', 48) * 0.25, str(path))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    lines = [json.loads(line) for line in out.out.splitlines() if line.strip()]
    return code, lines, out.err


def test_defaults():
    cfg = cli.parse_args(['--input', 'a.png', '--output', 'b.png'])
    assert cfg.illumination == IlluminationParams()
    assert cfg.illumination.lam == 0.15 and cfg.illumination.gamma == 0.6
    assert cfg.illumination.sigma == 3 and cfg.illumination.window == 15
    assert cfg.illumination.eps == 1e-3 and not cfg.illumination.squared_affinity
    assert cfg.solver == SolverSettings(tol=1e-5, max_iter=5000)
    assert cfg.fusion == FusionParams(levels='auto', mode='wta')
    assert not cfg.save_intermediates


def test_lambda_flag():
    cfg = cli.parse_args(['--input', 'a.png', '--output', 'b.png', '--lambda', '0.3'])
    assert cfg.illumination.lam == 0.3


def test_other_flags():
    cfg = cli.parse_args(['--input', 'a', '--output', 'b', '--levels', '3', '--fusion-mode',
                          'normalized', '--squared-affinity', '--cg-tol', '1e-7',
                          '--cg-max-iter', '20', '--save-intermediates'])
    assert cfg.fusion.levels == 3 and cfg.fusion.mode == 'normalized'
    assert cfg.illumination.squared_affinity and cfg.save_intermediates
    assert cfg.solver.tol == 1e-7 and cfg.solver.max_iter == 20


@pytest.mark.parametrize('flags, name', [
    (['--window', '14'], '--window'),
    (['--lambda', '-1'], '--lambda'),
    (['--gamma', '0'], '--gamma'),
    (['--gamma', '1.5'], '--gamma'),
    (['--levels', 'x'], '--levels'),
    (['--cg-tol', '0'], '--cg-tol'),
])
def test_invalid_values_exit_1(flags, name, capsys):
    code = cli.main(['--input', 'a.png', '--output', 'b.png'] + flags)
    assert code == cli.EXIT_USAGE
    assert name in capsys.readouterr().err


def test_unknown_flag_exit_1(capsys):
    assert cli.main(['--input', 'a.png', '--output', 'b.png', '--bogus']) == 1
    assert cli.main([]) == 1


def test_missing_input_exit_2(tmp_path, capsys):
    out = tmp_path / 'out.png'
    code = cli.main(['--input', str(tmp_path / 'nope.png'), '--output', str(out)])
    assert code == cli.EXIT_IO
    assert not out.exists()


def test_corrupt_input_exit_2(tmp_path, capsys):
    bad = tmp_path / 'bad.png'
    bad.write_bytes(b'not an image')
    assert cli.main(['--input', str(bad), '--output', str(tmp_path / 'o.png')]) == 2


def test_non_png_output_exit_1(dark_png, tmp_path, capsys):
    assert cli.main(['--input', dark_png, '--output', str(tmp_path / 'o.jpg')]) == 1


def test_single_report(dark_png, tmp_path, capsys):
    out = str(tmp_path / 'out.png')
    code, lines, _ = run(['--input', dark_png, '--output', out], capsys)
    assert code == 0 and len(lines) == 1
    rep = lines[0]
    assert rep['status'] == 'ok' and (rep['width'], rep['height']) == (72, 48)
    assert all(v >= 0 for v in rep['timings'].values())
    for p in ('forward', 'reverse'):
        assert rep['solver'][p]['residual'] <= rep['config']['solver']['tol']
    assert rep['config']['illumination']['lam'] == 0.15
    result = load(out)
    assert result.mean() > load(dark_png).mean()


def test_white_fixed_point(tmp_path, capsys):
    src = str(tmp_path / 'white.png')
    save(np.ones((20, 24, 3)), src)
    out = str(tmp_path / 'out.png')
    assert cli.main(['--input', src, '--output', out]) == 0
    assert np.abs(load(out) - 1.0).max() <= 1 / 255


def test_intermediates(dark_png, tmp_path, capsys):
    out = str(tmp_path / 'res.png')
    code, lines, _ = run(['--input', dark_png, '--output', out, '--save-intermediates'], capsys)
    assert code == 0
    for suffix in ('lf', 'lr', 'under', 'over', 'w0', 'w1', 'w2'):
        path = tmp_path / f'res_{suffix}.png'
        assert path.exists(), suffix
        assert str(path) in lines[0]['written']
    maps = [load(str(tmp_path / f'res_w{k}.png'))[:, :, 0] for k in range(3)]
    np.testing.assert_array_equal(sum(maps), 1.0)


def test_convergence_exit_3(dark_png, tmp_path, capsys):
    out = tmp_path / 'o.png'
    code = cli.main(['--input', dark_png, '--output', str(out),
                     '--cg-precond', 'jacobi', '--cg-max-iter', '1'])
    assert code == cli.EXIT_CONVERGENCE
    assert not out.exists()


def test_levels_too_deep_exit_1(dark_png, tmp_path, capsys):
    assert cli.main(['--input', dark_png, '--output', str(tmp_path / 'o.png'),
                     '--levels', '9']) == 1


def test_batch_with_corrupt_file(tmp_path, capsys):
    src = tmp_path / 'in'
    src.mkdir()
    save(corpus.photo('chelsea', 32) * 0.3, str(src / 'a.png'))
    save(corpus.photo('rocket', 32), str(src / 'b.jpg'))
    (src / 'c.png').write_bytes(b'\x89PNG garbage')
    (src / 'notes.txt').write_text('skip me')
    dst = tmp_path / 'out' / 'nested'
    code, lines, _ = run(['--input', str(src), '--output', str(dst), '--jobs', '2'], capsys)
    assert code == 0
    assert sorted(os.listdir(dst)) == ['a.png', 'b.png']
    summary = lines[-1]['summary']
    assert summary['processed'] == 3 and summary['succeeded'] == 2 and summary['failed'] == 1
    assert summary['failures'][0]['input'].endswith('c.png')


def test_batch_empty_dir_exit_1(tmp_path, capsys):
    (tmp_path / 'empty').mkdir()
    assert cli.main(['--input', str(tmp_path / 'empty'), '--output', str(tmp_path / 'o')]) == 1


def test_batch_identical_copies(tmp_path, capsys):
    src = tmp_path / 'in'
    src.mkdir()
    img = corpus.photo('astronaut', 40) * 0.3
    for k in range(3):
        save(img, str(src / f'copy{k}.png'))
    dst = tmp_path / 'out'
    assert cli.main(['--input', str(src), '--output', str(dst), '--jobs', '3']) == 0
    blobs = {(dst / f'copy{k}.png').read_bytes() for k in range(3)}
    assert len(blobs) == 1


def test_console_entry_point(dark_png, tmp_path):
    out = tmp_path / 'o.png'
    proc = subprocess.run([sys.executable, '-m', 'exposurefix', '--input', dark_png,
                           '--output', str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)['output'] == str(out)
    proc = subprocess.run([sys.executable, '-m', 'exposurefix', '--input', dark_png],
                          capture_output=True, text=True)
    assert proc.returncode == 1
