"""Live session service: HTTP for session CRUD, WebSocket for telemetry and edits.

Every session runs a cooperative stepper task on the event loop.  Commands
arriving over a socket are applied inline between steps (the loop is the
serialization point), so multi-point edits are atomic by construction and
no step ever observes a half-applied change.  Broadcast queues are
bounded; a slow consumer loses records and receives a gap marker instead
of stalling the simulation.
"""

from __future__ import annotations

import asyncio
import dataclasses
import itertools
import uuid

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .errors import LockedPointError, ScenarioError, SessionStateError
from .gvf import GuidanceGains, field_grid_csv
from .sim import NoiseModel, Scenario, SimSession
from .speed import SpeedSetpointParams

SCHEMA_VERSION = 1
SUBSCRIBER_BUFFER = 256
MAX_STEPS_PER_TICK = 200


def _points_payload(session: SimSession) -> list[dict]:
    pts = []
    for (seg, idx), role in sorted(session._roles.items()):
        x, y = session.spline.segments[seg].points[idx]
        pts.append({"segment": seg, "index": idx, "x": float(x), "y": float(y),
                    "role": role.value})
    return pts


class _Subscriber:
    def __init__(self):
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=SUBSCRIBER_BUFFER)
        self.dropped = 0

    def offer(self, message: dict) -> None:
        if self.dropped:
            try:
                self.queue.put_nowait({"schema": SCHEMA_VERSION, "type": "gap",
                                       "dropped": self.dropped})
                self.dropped = 0
            except asyncio.QueueFull:
                self.dropped += 1
                return
        try:
            self.queue.put_nowait(message)
        except asyncio.QueueFull:
            self.dropped += 1


class SessionRuntime:
    """One session plus its pacing state and fan-out list."""

    def __init__(self, session: SimSession, sid: str):
        self.session = session
        self.id = sid
        self.mode = "paused"
        self.multiplier = 1.0
        self.subscribers: list[_Subscriber] = []
        self.wake = asyncio.Event()
        self.closed = False
        self.task: asyncio.Task | None = None
        self._acc = 0.0

    # -- messages ------------------------------------------------------

    def status(self) -> dict:
        s = self.session
        return {
            "schema": SCHEMA_VERSION,
            "id": self.id,
            "mode": self.mode,
            "step": s.steps,
            "t": s.t,
            "multiplier": self.multiplier,
            "spline_version": s.spline_version,
            "warnings": s.spline_warnings,
            "points": _points_payload(s),
            "guidance": dataclasses.asdict(s.scenario.guidance),
            "setpoint": dataclasses.asdict(s.scenario.setpoint),
            "noise": dataclasses.asdict(s.scenario.noise),
        }

    def snapshot(self) -> dict:
        s = self.session
        msg = self.status()
        msg["type"] = "snapshot"
        msg["scenario"] = s.scenario.to_dict()
        msg["record"] = s.log.records[-1].as_dict() if s.log.records else None
        return msg

    def broadcast(self, message: dict) -> None:
        for sub in self.subscribers:
            sub.offer(message)

    def broadcast_record(self, record) -> None:
        s = self.session
        self.broadcast({
            "schema": SCHEMA_VERSION,
            "type": "record",
            "step": s.steps,
            "spline_version": s.spline_version,
            "points": _points_payload(s),
            "record": record.as_dict(),
        })

    def broadcast_status(self) -> None:
        msg = self.status()
        msg["type"] = "status"
        self.broadcast(msg)

    # -- stepping --------------------------------------------------------

    def _finish(self):
        self.mode = "finished"
        self.broadcast_status()

    async def loop(self):
        dt = self.session.scenario.dt
        while not self.closed:
            if self.mode != "running":
                self.wake.clear()
                await self.wake.wait()
                continue
            self._acc += self.multiplier
            n = min(int(self._acc), MAX_STEPS_PER_TICK)
            self._acc -= n
            for _ in range(n):
                if self.session.finished:
                    self._finish()
                    break
                record = self.session.step()
                self.broadcast_record(record)
                if self.session.finished:
                    self._finish()
                    break
            if self.mode == "finished":
                continue
            await asyncio.sleep(dt)

    # -- commands ----------------------------------------------------------

    def apply_command(self, cmd: dict) -> dict:
        """Apply one EditCommand; returns the ack payload or raises."""
        kind = cmd.get("kind")
        s = self.session
        if kind == "pause":
            if self.mode == "running":
                self.mode = "paused"
            self.broadcast_status()
        elif kind == "resume":
            if self.mode == "finished" or s.finished:
                raise SessionStateError("session already finished")
            self.mode = "running"
            self.wake.set()
            self.broadcast_status()
        elif kind == "reset":
            s.reset()
            self.mode = "paused"
            self._acc = 0.0
            self.broadcast_status()
        elif kind == "set_speed_multiplier":
            value = float(cmd["value"])
            if not 0.0 < value <= 1000.0:
                raise ValueError("multiplier must be in (0, 1000]")
            self.multiplier = value
            self.broadcast_status()
        elif kind == "move_free_point":
            moves = cmd.get("moves")
            if moves is None:
                moves = [{k: cmd[k] for k in ("segment", "index", "x", "y")}]
            s.move_points([(m["segment"], m["index"], m["x"], m["y"]) for m in moves])
            self.broadcast({
                "schema": SCHEMA_VERSION, "type": "spline",
                "spline_version": s.spline_version, "points": _points_payload(s),
                "segments": [{"points": [[float(x), float(y)] for x, y in seg.points]}
                             for seg in s.spline.segments],
            })
        elif kind == "set_guidance_gains":
            s.set_guidance_gains(GuidanceGains(
                k1=float(cmd["k1"]), k2=float(cmd["k2"]),
                k_theta=float(cmd["k_theta"]), direction=int(cmd.get("direction", 1))))
            self.broadcast_status()
        elif kind == "set_speed_params":
            s.set_setpoint_params(SpeedSetpointParams(
                v_min=float(cmd["v_min"]), v_max=float(cmd["v_max"]),
                c_kappa=float(cmd["c_kappa"])))
            self.broadcast_status()
        elif kind == "set_noise":
            s.set_noise(NoiseModel(kind=str(cmd["noise_kind"]),
                                   bound=float(cmd["bound"]),
                                   sigma=cmd.get("sigma")))
            self.broadcast_status()
        else:
            raise ValueError(f"unknown command kind {kind!r}")
        return {"schema": SCHEMA_VERSION, "type": "ack", "kind": kind,
                "effective_step": s.steps, "id": cmd.get("id")}

    def close(self):
        self.closed = True
        self.mode = "finished"
        self.wake.set()
        if self.task is not None:
            self.task.cancel()


def create_app(ui_dir=None) -> FastAPI:
    app = FastAPI(title="gvfnav ground control")
    runtimes: dict[str, SessionRuntime] = {}
    counter = itertools.count(1)

    def get_runtime(sid: str) -> SessionRuntime:
        rt = runtimes.get(sid)
        if rt is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return rt

    @app.post("/sessions")
    async def create_session(payload: dict):
        try:
            scenario = Scenario.from_dict(payload)
            session = SimSession(scenario)
        except ScenarioError as exc:
            return JSONResponse(status_code=422, content={
                "errors": [{"path": path, "message": msg} for path, msg in exc.errors]})
        except Exception as exc:
            return JSONResponse(status_code=422, content={
                "errors": [{"path": "", "message": str(exc)}]})
        sid = f"s{next(counter)}-{uuid.uuid4().hex[:8]}"
        rt = SessionRuntime(session, sid)
        rt.task = asyncio.ensure_future(rt.loop())
        runtimes[sid] = rt
        return rt.status()

    @app.get("/sessions")
    async def list_sessions():
        return {"sessions": [rt.status() for rt in runtimes.values()]}

    @app.get("/sessions/{sid}")
    async def session_status(sid: str):
        return get_runtime(sid).status()

    @app.delete("/sessions/{sid}")
    async def delete_session(sid: str):
        rt = get_runtime(sid)
        rt.close()
        del runtimes[sid]
        return {"deleted": sid}

    @app.get("/sessions/{sid}/log.csv")
    async def session_log(sid: str):
        rt = get_runtime(sid)
        return PlainTextResponse(rt.session.log.to_csv_text(), media_type="text/csv")

    @app.get("/sessions/{sid}/events")
    async def session_events(sid: str):
        rt = get_runtime(sid)
        return {"scenario": rt.session.scenario.to_dict(), "events": rt.session.events}

    @app.get("/sessions/{sid}/field")
    async def session_field(sid: str, bbox: str, res: int = 20, w: float | None = None):
        rt = get_runtime(sid)
        try:
            box = [float(v) for v in bbox.split(",")]
            if len(box) != 4:
                raise ValueError
        except ValueError:
            raise HTTPException(status_code=422, detail="bbox must be x0,y0,x1,y1")
        w_eval = rt.session.w if w is None else float(w)
        csv = field_grid_csv(rt.session.spline, rt.session.scenario.guidance,
                             w_eval, box, res)
        return PlainTextResponse(csv, media_type="text/csv")

    @app.websocket("/sessions/{sid}/stream")
    async def stream(websocket: WebSocket, sid: str):
        rt = runtimes.get(sid)
        if rt is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        sub = _Subscriber()
        rt.subscribers.append(sub)
        await websocket.send_json(rt.snapshot())

        async def sender():
            while True:
                msg = await sub.queue.get()
                await websocket.send_json(msg)

        send_task = asyncio.ensure_future(sender())
        try:
            while True:
                cmd = await websocket.receive_json()
                if cmd.get("kind") == "field_request":
                    try:
                        box = [float(v) for v in cmd["bbox"]]
                        res = int(cmd.get("res", 20))
                        w_eval = float(cmd.get("w", rt.session.w))
                        csv = field_grid_csv(rt.session.spline,
                                             rt.session.scenario.guidance,
                                             w_eval, box, res)
                        await websocket.send_json({
                            "schema": SCHEMA_VERSION, "type": "field_frame",
                            "w": w_eval, "bbox": box, "res": res,
                            "rows": [[float(v) for v in line.split(",")]
                                     for line in csv.strip().split("\n")[1:]],
                            "id": cmd.get("id")})
                    except (KeyError, ValueError) as exc:
                        await websocket.send_json({
                            "schema": SCHEMA_VERSION, "type": "error",
                            "reason": str(exc), "id": cmd.get("id")})
                    continue
                try:
                    ack = rt.apply_command(cmd)
                    await websocket.send_json(ack)
                except (LockedPointError, SessionStateError, ValueError, KeyError) as exc:
                    await websocket.send_json({
                        "schema": SCHEMA_VERSION, "type": "error",
                        "kind": cmd.get("kind"), "reason": str(exc),
                        "id": cmd.get("id")})
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            if sub in rt.subscribers:
                rt.subscribers.remove(sub)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
