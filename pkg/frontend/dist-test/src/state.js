// Session view state.  Everything shown on screen derives from server
// snapshots; there is no client-side rewrite logic.
export function emptyView() {
    return {
        sessionId: null,
        chem: "",
        stepCounter: 0,
        running: false,
        terminated: null,
        doc: null,
        mol: "",
        counts: {},
        sparkline: [],
        matches: [],
        appliedLast: [],
        weights: {},
    };
}
export class SessionStore {
    view = emptyView();
    listeners = [];
    get current() {
        return this.view;
    }
    subscribe(listener) {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }
    // Snapshots may arrive over HTTP replies and the push stream in any
    // interleaving; never step backwards.
    apply(snap) {
        if (this.view.sessionId === snap.session && snap.step < this.view.stepCounter) {
            return;
        }
        this.view = {
            sessionId: snap.session,
            chem: snap.chem,
            stepCounter: snap.step,
            running: snap.running,
            terminated: snap.terminated,
            doc: snap.d3 ?? this.view.doc,
            mol: snap.mol,
            counts: snap.counts,
            sparkline: snap.history,
            matches: snap.matches,
            appliedLast: snap.applied_last,
            weights: snap.weights,
        };
        for (const listener of this.listeners)
            listener(this.view);
    }
    reset() {
        this.view = emptyView();
        for (const listener of this.listeners)
            listener(this.view);
    }
}
