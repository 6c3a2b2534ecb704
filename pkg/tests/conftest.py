from datetime import timedelta
from pathlib import Path

import pytest

from .helpers import T0, post_doc, write_posts_file


@pytest.fixture
def forum_dir(tmp_path: Path) -> Path:
    """A forum fixture dir with 4 posts, one already answered."""
    directory = tmp_path / "forum"
    directory.mkdir()
    posts = [
        post_doc(
            f"p{i}",
            created_at=(T0 + timedelta(minutes=i)).strftime("%Y-%m-%dT%H:%M:%SZ"),
            answered=(i == 2),
        )
        for i in range(1, 5)
    ]
    write_posts_file(directory, posts)
    return directory
