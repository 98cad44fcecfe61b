/** Session controller: drives the question flow against the API, keeps the
 * view state, and surfaces server rejections without losing the session. */

import { ApiError, SessionApi, type SessionOptions } from "./api.js";
import type { AfmDocument, Snapshot } from "./model.js";
import { answerPayload } from "./flow.js";

export interface ControllerState {
	sessionId: string | null;
	snapshot: Snapshot | null;
	model: AfmDocument | null;
	error: { stage: string; code: string; message: string } | null;
	busy: boolean;
}

export class SessionController {
	state: ControllerState = {
		sessionId: null,
		snapshot: null,
		model: null,
		error: null,
		busy: false,
	};

	private listeners: (() => void)[] = [];

	constructor(private readonly api: SessionApi) {}

	onChange(fn: () => void): void {
		this.listeners.push(fn);
	}

	private emit(): void {
		for (const fn of this.listeners) fn();
	}

	private async guard<T>(work: () => Promise<T>): Promise<T | undefined> {
		if (this.state.busy) return undefined;
		this.state.busy = true;
		this.state.error = null;
		this.emit();
		try {
			return await work();
		} catch (e) {
			if (e instanceof ApiError) {
				this.state.error = { stage: e.stage, code: e.code, message: e.message };
			} else {
				this.state.error = { stage: "client", code: "Error", message: String(e) };
			}
			return undefined;
		} finally {
			this.state.busy = false;
			this.emit();
		}
	}

	async start(csv: string, dk?: string, options?: SessionOptions): Promise<void> {
		await this.guard(async () => {
			const created = await this.api.createSession(csv, dk, options);
			this.state.sessionId = created.id;
			await this.refresh();
		});
	}

	/** Resume an existing session by id (the UI is stateless beyond it). */
	async resume(sessionId: string): Promise<void> {
		await this.guard(async () => {
			this.state.sessionId = sessionId;
			await this.refresh();
		});
	}

	private async refresh(): Promise<void> {
		if (!this.state.sessionId) return;
		this.state.snapshot = await this.api.getState(this.state.sessionId);
		if (this.state.snapshot.status === "completed") {
			this.state.model = await this.api.getModel(this.state.sessionId);
		}
	}

	/** Submit a selection for the pending question; selections index into the
	 * offered candidates so no fabricated option can reach the server. */
	async submit(selection: number[] | string): Promise<void> {
		await this.guard(async () => {
			const snapshot = this.state.snapshot;
			if (!snapshot?.question || !this.state.sessionId) {
				throw new Error("no pending question");
			}
			const payload = answerPayload(snapshot.question, selection);
			await this.api.answer(this.state.sessionId, payload);
			await this.refresh();
		});
	}

	async exportModel(format: "afm-json" | "text"): Promise<string | undefined> {
		if (!this.state.sessionId) return undefined;
		return await this.guard(() =>
			this.api.exportRaw(this.state.sessionId as string, format),
		);
	}
}
