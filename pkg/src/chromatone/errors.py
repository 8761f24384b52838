"""Exception hierarchy.

``InputError`` subclasses describe bad files or arguments (CLI exit code 2);
``PipelineError`` subclasses mean the inputs were readable but carried no
usable signal (CLI exit code 3).
"""


class ChromatoneError(Exception):
    pass


class InputError(ChromatoneError):
    pass


class ImageNotFoundError(InputError, FileNotFoundError):
    pass


class ImageDecodeError(InputError):
    pass


class DimensionMismatchError(InputError, ValueError):
    def __init__(self, expected, got, what="mask"):
        self.expected = expected
        self.got = got
        super().__init__(
            f"{what} is {got[0]}x{got[1]} but the image is {expected[0]}x{expected[1]}"
        )


class ScaleFormatError(InputError, ValueError):
    pass


class LandmarkFormatError(InputError, ValueError):
    pass


class ManifestError(InputError):
    pass


class PipelineError(ChromatoneError):
    pass


class InsufficientPixelsError(PipelineError):
    def __init__(self, count, minimum):
        self.count = count
        self.minimum = minimum
        super().__init__(f"region has {count} pixels, at least {minimum} required")


class EmptyRegionError(PipelineError, ValueError):
    pass


class NoVeinsDetectedError(PipelineError):
    def __init__(self, msg="no veins detected"):
        super().__init__(msg)


class DegenerateLandmarksError(PipelineError):
    pass
