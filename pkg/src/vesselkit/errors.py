"""Exception types shared across the pipeline stages."""


class VesselKitError(Exception):
    """Base class for pipeline errors."""


class NoCandidatesError(VesselKitError):
    """No plausible vessel pixel exists in the queried region."""


class BackendFailure(VesselKitError):
    """A segmentation backend failed (transport or model error).

    Carries the request id so failures can be correlated with logs.
    """

    def __init__(self, message: str, request_id: str | None = None):
        super().__init__(message if request_id is None else f"{message} [request {request_id}]")
        self.request_id = request_id


class SegmentOutsideFieldError(VesselKitError):
    """A centerline segment references pixels outside the distance field."""


class SegmentTooShortError(VesselKitError):
    """Profile shorter than the configured minimum segment length."""
