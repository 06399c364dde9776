from contextlib import contextmanager

from tqdm.auto import tqdm


class _FakeClass:
    def update(self, *args, **kwargs):
        pass

    def set_postfix(self, *args, **kwargs):
        pass


@contextmanager
def with_progress(total, desc, silent: bool = False, unit: str = 'step'):
    """
    Progress bar over ``total`` steps, or a no-op stand-in when ``silent``.
    """
    if not silent:
        with tqdm(total=total, unit=unit, desc=desc, leave=False) as pbar:
            yield pbar
    else:
        yield _FakeClass()
