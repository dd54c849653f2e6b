"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 solver non-convergence.
One JSON object per line is written to stdout for every processed image;
diagnostics go to stderr.
"""
import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .fusion import FusionParams
from .illumination import IlluminationParams
from .image import SUPPORTED_EXTENSIONS, ImageFormatError, load, save
from .pipeline import PipelineConfig, correct_exposure
from .solver import ConvergenceError, SolverSettings

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONVERGENCE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f'{self.prog}: error: {message}\n')
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog='exposurefix',
                description='Correct under-, over- and mixed-exposure photographs.')
    p.add_argument('--input', required=True, help='input image or directory of images')
    p.add_argument('--output', required=True,
                   help='output PNG (single image) or output directory (batch)')
    p.add_argument('--lambda', dest='lam', type=float, default=0.15,
                   help='smoothness weight (default: %(default)s)')
    p.add_argument('--gamma', type=float, default=0.6,
                   help='illumination gamma in (0, 1] (default: %(default)s)')
    p.add_argument('--sigma', type=float, default=3.0,
                   help='spatial affinity std-dev in pixels (default: %(default)s)')
    p.add_argument('--window', type=int, default=15,
                   help='odd texture window side (default: %(default)s)')
    p.add_argument('--eps', type=float, default=1e-3, help='stabilizer (default: %(default)s)')
    p.add_argument('--levels', default='auto',
                   help="pyramid depth, integer or 'auto' (default: %(default)s)")
    p.add_argument('--fusion-mode', choices=['wta', 'normalized'], default='wta')
    p.add_argument('--save-intermediates', action='store_true',
                   help='also write illuminations, intermediate images and fusion maps')
    p.add_argument('--cg-tol', type=float, default=1e-5)
    p.add_argument('--cg-max-iter', type=int, default=5000)
    p.add_argument('--cg-precond', choices=['factor', 'jacobi'], default='factor')
    p.add_argument('--squared-affinity', action='store_true',
                   help='use squared distance in the spatial Gaussian')
    p.add_argument('--jobs', type=int, default=1, help='parallel images in batch mode')
    p.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    return p


def parse_args(argv=None):
    """Parse and validate flags into a :class:`PipelineConfig`.

    Invalid values exit with status 1 and a message naming the flag.
    """
    parser = build_parser()
    a = parser.parse_args(argv)

    if a.lam < 0:
        parser.error(f'--lambda must be non-negative, got {a.lam}')
    if not 0 < a.gamma <= 1:
        parser.error(f'--gamma must lie in (0, 1], got {a.gamma}')
    if not a.sigma > 0:
        parser.error(f'--sigma must be positive, got {a.sigma}')
    if a.window < 3 or a.window % 2 == 0:
        parser.error(f'--window must be odd and >= 3, got {a.window}')
    if not a.eps > 0:
        parser.error(f'--eps must be positive, got {a.eps}')
    if not a.cg_tol > 0:
        parser.error(f'--cg-tol must be positive, got {a.cg_tol}')
    if a.cg_max_iter < 1:
        parser.error(f'--cg-max-iter must be >= 1, got {a.cg_max_iter}')
    if a.jobs < 1:
        parser.error(f'--jobs must be >= 1, got {a.jobs}')
    levels = a.levels
    if levels != 'auto':
        try:
            levels = int(levels)
        except ValueError:
            parser.error(f"--levels must be an integer or 'auto', got {a.levels!r}")
        if levels < 1:
            parser.error(f'--levels must be >= 1, got {levels}')

    return PipelineConfig(
        illumination=IlluminationParams(lam=a.lam, gamma=a.gamma, sigma=a.sigma,
                                        window=a.window, eps=a.eps,
                                        squared_affinity=a.squared_affinity),
        solver=SolverSettings(tol=a.cg_tol, max_iter=a.cg_max_iter,
                              preconditioner=a.cg_precond),
        fusion=FusionParams(levels=levels, mode=a.fusion_mode),
        input=a.input,
        output=a.output,
        save_intermediates=a.save_intermediates,
        jobs=a.jobs,
    )


def _intermediate_paths(output):
    stem, _ = os.path.splitext(output)
    names = ['lf', 'lr', 'under', 'over', 'w0', 'w1', 'w2']
    return {n: f'{stem}_{n}.png' for n in names}


def process_image(src, dst, config):
    """Correct one file and write the result; returns the run report."""
    img = load(src)
    try:
        result = correct_exposure(img, config)
    except ValueError as exc:
        # e.g. an explicit --levels deeper than this image allows
        raise UsageError(str(exc)) from exc
    save(result.image, dst)
    written = [dst]
    if config.save_intermediates:
        paths = _intermediate_paths(dst)
        save(result.forward_illumination, paths['lf'])
        save(result.reverse_illumination, paths['lr'])
        save(result.triplet.under_corrected, paths['under'])
        save(result.triplet.over_corrected, paths['over'])
        for k, wmap in enumerate(result.maps.maps):
            save(wmap, paths[f'w{k}'])
        written += list(paths.values())
    h, w = img.shape[:2]
    return {
        'input': src,
        'output': dst,
        'status': 'ok',
        'width': w,
        'height': h,
        'timings': result.timings,
        'solver': result.solver,
        'written': written,
        'config': config.as_dict(),
    }


def _classify(exc):
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, (OSError, ImageFormatError)):
        return EXIT_IO
    raise exc


def _emit(obj):
    sys.stdout.write(json.dumps(obj) + '\n')
    sys.stdout.flush()


def run_single(config):
    """Process one file. Returns ``(exit_code, report)``."""
    if not config.output.lower().endswith('.png'):
        sys.stderr.write(f'exposurefix: error: --output must be a .png file: {config.output}\n')
        return EXIT_USAGE, None
    try:
        report = process_image(config.input, config.output, config)
    except Exception as exc:  # noqa: BLE001 -- mapped to an exit code below
        code = _classify(exc)
        sys.stderr.write(f'exposurefix: {config.input}: {exc}\n')
        return code, {'input': config.input, 'status': 'error', 'error': str(exc),
                      'exit_code': code}
    _emit(report)
    return EXIT_OK, report


def run_batch(config):
    """Process every supported image in a directory.

    Per-file failures are recorded and do not stop the batch. Returns
    ``(exit_code, reports)``; the last element of `reports` is the summary.
    """
    names = sorted(f for f in os.listdir(config.input)
                   if f.lower().endswith(SUPPORTED_EXTENSIONS)
                   and os.path.isfile(os.path.join(config.input, f)))
    if not names:
        sys.stderr.write(f'exposurefix: error: no PNG/JPEG files in {config.input}\n')
        return EXIT_USAGE, []
    try:
        os.makedirs(config.output, exist_ok=True)
    except OSError as exc:
        sys.stderr.write(f'exposurefix: cannot create {config.output}: {exc}\n')
        return EXIT_IO, []

    jobs = [(os.path.join(config.input, n),
             os.path.join(config.output, os.path.splitext(n)[0] + '.png')) for n in names]

    def work(job):
        src, dst = job
        try:
            return process_image(src, dst, config)
        except Exception as exc:  # noqa: BLE001
            code = _classify(exc)
            sys.stderr.write(f'exposurefix: {src}: {exc}\n')
            return {'input': src, 'status': 'error', 'error': str(exc), 'exit_code': code}

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        reports = list(pool.map(work, jobs))
    for r in reports:
        _emit(r)
    failures = [{'input': r['input'], 'error': r['error']} for r in reports
                if r['status'] != 'ok']
    summary = {'summary': {'processed': len(reports),
                           'succeeded': len(reports) - len(failures),
                           'failed': len(failures),
                           'failures': failures}}
    _emit(summary)
    return EXIT_OK, reports + [summary]


def main(argv=None):
    try:
        config = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if os.path.isdir(config.input):
        code, _ = run_batch(config)
    elif not os.path.exists(config.input):
        sys.stderr.write(f'exposurefix: error: input not found: {config.input}\n')
        code = EXIT_IO
    else:
        code, _ = run_single(config)
    return code


if __name__ == '__main__':
    sys.exit(main())
