"""
Progress tracker using tqdm.
Shared by node embedding, the noise sweep, cross-validation folds and the bench.
"""

from tqdm import tqdm


class TaskProgress:
    """Track progress of a batch of independent tasks with tqdm."""

    def __init__(self, total, desc, unit="task", disable=False):
        self.total = total
        self.completed = 0
        self.failed = 0
        self.pbar = tqdm(
            total=total,
            desc=f"  {desc}",
            unit=unit,
            bar_format="{l_bar}{bar:30}{r_bar}",
            ncols=80,
            disable=disable,
            leave=False,
        )

    def update(self, success=True):
        """Update progress by one task."""
        self.completed += 1
        if not success:
            self.failed += 1
        self.pbar.update(1)
        if self.failed:
            self.pbar.set_postfix({
                'ok': self.completed - self.failed,
                'fail': self.failed,
            })

    def close(self):
        self.pbar.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
        return False
